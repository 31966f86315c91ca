"""Bigraded bidifferential algebras: building, signs, realization, tensor powers, morphisms."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bba import corpus
from bba.bicomplex import cohomology
from bba.cbba import (
    CbbaMorphism, PresentedCBBA, TableCBBA, augmentation_ideal, build, check_morphism,
    is_weak_equivalence, tensor_power,
)
from bba.errors import StructureError, TruncationRequired
from bba.formats import Generator, parse_map
from bba.linalg import Scalar


@pytest.fixture(scope="module")
def kt():
    return build(corpus.read("kodaira-thurston"))


@pytest.fixture(scope="module")
def fil():
    return build(corpus.read("filiform"))


def test_build_dimensions(kt, fil):
    assert kt.dimension() == 16
    assert fil.dimension() == 256
    assert sum(kt.realize(4).dim(*bd) for bd in kt.realize(4).bidegrees) == 16


def test_wrong_bidegree_differential_rejected():
    with pytest.raises(StructureError):
        build("gen x 1 0\ngen y 1 0\ndel y = x\n")


def test_infinite_algebra_needs_bound():
    H = build(corpus.read("hopf"))
    assert H.top_degree is None
    with pytest.raises(TruncationRequired):
        H.realize(None)


def test_unit_and_koszul_signs(kt):
    P = kt.parse
    x, xb = P("x"), P("xbar")
    assert kt.one() * x == x
    assert x * xb == -(xb * x)
    assert x * x == kt.zero()


def test_filiform_product_is_ddbar_exact(fil):
    P = fil.parse
    prod = P("x*ybar") * P("y*xbar")
    assert prod == (-P("z*zbar")).ddbar()
    assert prod == P("x*y*xbar*ybar")


def test_truncation_monotonicity():
    H = build(corpus.read("hopf"))
    R6, R8 = H.realize(6), H.realize(8)
    for bd in R6.bidegrees:
        if sum(bd) <= 4:
            assert R6.dim(*bd) == R8.dim(*bd)
            assert R6.complex.d1(*bd) == R8.complex.d1(*bd)
            assert R6.complex.d2(*bd) == R8.complex.d2(*bd)


def test_augmentation_ideal(kt):
    I = augmentation_ideal(kt)
    assert I.dim == 15
    P = kt.parse
    for a in ("x", "y*ybar", "x*xbar*y"):
        e = P(a)
        assert I.contains(e) and I.contains(e.d1()) and I.contains(e.d2())
        assert I.contains(e * P("xbar"))


def test_tensor_powers(kt):
    I = augmentation_ideal(kt)
    T1 = tensor_power(I, 1)
    assert dict(T1.complex.dims) == dict(I.complex.dims)
    T2 = tensor_power(I, 2, degrees=[2])
    assert sum(n for bd, n in T2.complex.dims.items() if sum(bd) == 2) == 16
    T2f = tensor_power(I, 2)
    D = T2f.complex
    for p, q in D.support:
        assert (D.d1(p + 1, q) @ D.d1(p, q)).is_zero()
        assert (D.d2(p, q + 1) @ D.d2(p, q)).is_zero()
        assert (D.d1(p, q + 1) @ D.d2(p, q) + D.d2(p + 1, q) @ D.d1(p, q)).is_zero()


# -- algebraic identities on random elements ----------------------------------

def elements(A, max_terms=4):
    keys = [k for bd in A.realize(None).keys.values() for k in bd]
    coef = st.sampled_from([Scalar(1), Scalar(-2), Scalar(0, 1), Scalar(1, 3)])
    return st.lists(st.tuples(st.sampled_from(keys), coef), min_size=1, max_size=max_terms).map(
        lambda ts: sum((A.basis_element(k).scale(c) for k, c in ts), A.zero()))


def homogeneous(A):
    return elements(A).map(lambda e: next(iter(e.homogeneous_parts().values()), A.zero()) if e else e)


FIL = build(corpus.read("filiform"))
IW = build(corpus.read("iwasawa-sub"))


@settings(max_examples=60, deadline=None)
@given(st.data())
@pytest.mark.parametrize("A", [FIL, IW], ids=["filiform", "iwasawa-sub"])
def test_leibniz_associativity_commutativity(A, data):
    a, b, c = (data.draw(homogeneous(A)) for _ in range(3))
    if not a or not b:
        return
    s = -1 if a.degree() % 2 else 1
    assert (a * b).d1() == a.d1() * b + (a * b.d1()).scale(s)
    assert (a * b).d2() == a.d2() * b + (a * b.d2()).scale(s)
    assert (a * b) * c == a * (b * c)
    t = -1 if (a.degree() * b.degree()) % 2 else 1
    assert a * b == (b * a).scale(t)
    assert a.d1().d1() == A.zero() and a.d2().d2() == A.zero()
    assert a.d1().d2() == -(a.d2().d1())


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_conjugation_intertwines(data):
    a = data.draw(homogeneous(FIL))
    b = data.draw(homogeneous(FIL))
    assert a.conj().conj() == a
    assert a.d1().conj() == a.conj().d2()
    assert (a * b).conj() == a.conj() * b.conj()


# -- morphisms ----------------------------------------------------------------

def test_identity_is_weak_equivalence(kt):
    assert is_weak_equivalence(CbbaMorphism.identity(kt)).is_weak_equivalence


def _map(name):
    mf = parse_map(corpus.read(name))
    return CbbaMorphism.from_polys(build(corpus.read(mf.source)), build(corpus.read(mf.target)), mf.images)


def test_corpus_maps():
    for name in ("hopf-to-quotient.map", "flag-to-invariant.map"):
        f = _map(name)
        assert check_morphism(f).ok
        v = is_weak_equivalence(f)
        assert v.is_weak_equivalence
        assert v.range_label.startswith("up to degree")


def test_flag_model_matches_invariant_complex_in_low_degrees():
    f = _map("flag-to-invariant.map")
    F, RS, RT = f.complex_map(6)
    for th in ("BC", "A"):
        for bd in RT.bidegrees:
            if sum(bd) <= 4:
                assert cohomology(RS.complex, th, *bd).dim == cohomology(RT.complex, th, *bd).dim


def test_broken_map_rejected(kt):
    bad = CbbaMorphism(kt, kt, {"x": kt.parse("x"), "xbar": kt.parse("xbar"), "y": kt.zero(), "ybar": kt.zero()})
    v = check_morphism(bad)
    assert not v.ok and any("dbar y" in i for i in v.issues)


def test_zero_map_to_trivial_algebra(kt):
    triv = TableCBBA([], {}, name="trivial")
    assert triv.dimension() == 1
    f = CbbaMorphism(kt, triv, {})
    assert check_morphism(f).ok
    assert not is_weak_equivalence(f).is_weak_equivalence


def test_presented_relations():
    A = PresentedCBBA([Generator("x", 1, 1)], relations=[(("x", 2),)])
    assert A.parse("x") * A.parse("x") == A.zero()
    assert A.dimension() == 2
