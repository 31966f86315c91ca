"""Double complexes: validation, the five cohomologies, Schweitzer complexes, zigzags, E1-isomorphisms."""

from __future__ import annotations

import random

import pytest

from bba import corpus
from bba.bicomplex import (
    THEORIES, ComplexMap, DoubleComplex, cohomology, cohomology_dims, decomposition_dims,
    direct_cohomology_dims, e1_iso_check, identity_map, schweitzer, total_complex, validate,
    zero_map, zigzag_decompose,
)
from bba.cbba import CbbaMorphism, build, is_weak_equivalence
from bba.errors import StructureError
from bba.formats import parse_map
from bba.linalg import ONE, Matrix, Subspace, span_sum

from builders import random_complex, schweitzer_class


def realized(name, N=None):
    A = build(corpus.read(name))
    return A.realize(N if A.top_degree is None else None)


@pytest.fixture(scope="module")
def kt():
    return realized("kodaira-thurston")


# -- validation ---------------------------------------------------------------

def test_validate_examples():
    assert validate(DoubleComplex.dot(0, 0)).ok
    assert validate(DoubleComplex.square(0, 0)).ok
    e = Matrix.identity(1)
    bad = DoubleComplex({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                        del_={(0, 0): e, (0, 1): e}, dbar={(0, 0): e, (1, 0): e})
    rep = validate(bad)
    assert not rep.ok
    assert [(i.identity, i.bidegree) for i in rep.issues] == [("del dbar + dbar del = 0", (0, 0))]


def test_shape_mismatch_rejected():
    with pytest.raises(StructureError):
        DoubleComplex({(0, 0): 1, (1, 0): 2}, del_={(0, 0): Matrix.identity(1)})


def test_corpus_complexes_valid():
    for name in ("kodaira-thurston", "filiform", "iwasawa-sub", "flag-su3-invariant", "calabi-eckmann"):
        assert validate(realized(name).complex).ok, name
    for name in ("hopf", "flag-su3"):
        assert validate(realized(name, 6).complex).ok, name


# -- cohomology ---------------------------------------------------------------

def test_kt_bott_chern_11(kt):
    G = cohomology(kt.complex, "BC", 1, 1)
    assert G.dim == 3
    A = kt.algebra
    span = [kt.vector(A.parse(s)) for s in ("x*xbar", "x*ybar", "xbar*y")]
    for v in span:
        assert G.quotient.ambient.contains(v)
    # the three monomials are independent modulo im ∂∂̄
    assert span_sum(Subspace(G.quotient.ambient_dim, span), G.quotient.modulus).dim == 3 + G.quotient.modulus.dim


def test_empty_bidegree_is_zero(kt):
    for th in ("column", "row", "BC", "A"):
        assert cohomology(kt.complex, th, 7, -3).dim == 0


def test_total_complex_examples(kt):
    assert total_complex(DoubleComplex.square(0, 0)).cohomology(0).dim == 0
    assert all(total_complex(DoubleComplex.square(0, 0)).cohomology(k).dim == 0 for k in range(-1, 4))
    assert total_complex(DoubleComplex.dot(2, 1)).cohomology(3).dim == 1
    assert total_complex(kt.complex).cohomology(1).dim == 3


def test_real_structure_symmetry():
    for name in ("kodaira-thurston", "filiform", "iwasawa-sub", "calabi-eckmann"):
        D = realized(name).complex
        for th in ("BC", "A"):
            dims = cohomology_dims(D, th)
            for (p, q), n in dims.items():
                assert dims.get((q, p), 0) == n, (name, th, p, q)


def test_additivity_and_invisible_squares():
    rng = random.Random(7)
    for _ in range(10):
        D1, D2 = random_complex(rng, 10), random_complex(rng, 10)
        S = D1.direct_sum(D2)
        d1, d2, ds = (direct_cohomology_dims(D) for D in (D1, D2, S))
        for th in THEORIES:
            keys = set(d1[th]) | set(d2[th]) | set(ds[th])
            for k in keys:
                assert ds[th].get(k, 0) == d1[th].get(k, 0) + d2[th].get(k, 0)
        Sq = D1.direct_sum(DoubleComplex.square(1, 1))
        dq = direct_cohomology_dims(Sq)
        for th in THEORIES:
            assert {k: v for k, v in dq[th].items() if v} == {k: v for k, v in d1[th].items() if v}


# -- Schweitzer complex -------------------------------------------------------

def test_schweitzer_low_indices_match_aeppli_and_bott_chern(kt):
    D = kt.complex
    for p, q in [(1, 1), (2, 1), (1, 2), (2, 2)]:
        view = schweitzer(D, p, q, -1, 2)
        assert view.cohomology(0).quotient == cohomology(D, "A", p - 1, q - 1).quotient
        assert view.cohomology(1).quotient == cohomology(D, "BC", p, q).quotient


def test_schweitzer_components_and_compositions():
    R = realized("filiform")
    D = R.complex
    view = schweitzer(D, 4, 2, -3, 2)
    assert view.components[1] == ((4, 2),)
    assert view.components[0] == ((3, 1),)
    assert set(view.components[-1]) == {(2, 1), (3, 0)}
    assert view.components[2] == ((4, 3),)  # A^{5,2} = 0 with four (1,0) generators
    for i in range(-3, 2):
        assert (view.boundary[i + 1] @ view.boundary[i]).is_zero(), i


def test_filiform_xwzbar_class_nonzero():
    R = realized("filiform")
    closed, exact = schweitzer_class(R, (4, 2), -1, R.algebra.parse("x*w*zbar"))
    assert closed and not exact


# -- zigzags ------------------------------------------------------------------

def test_square_decomposition():
    Z = zigzag_decompose(DoubleComplex.square(0, 0))
    assert [(s.kind, m) for s, m in Z.items()] == [("square", 1)]


def test_zigzag_constructor_and_decomposition():
    D = DoubleComplex.zigzag([(0, 1), (1, 1), (1, 0)])
    Z = zigzag_decompose(D)
    assert [(s.kind, s.bidegrees, m) for s, m in Z.items()] == [("zigzag", ((0, 1), (1, 1), (1, 0)), 1)]
    assert cohomology(D, "BC", 1, 1).dim == 1 and cohomology(D, "A", 1, 1).dim == 0


def test_kt_decomposition_reproduces_dims(kt):
    Z = zigzag_decompose(kt.complex)
    rec = decomposition_dims(Z)
    assert rec == direct_cohomology_dims(kt.complex)
    assert rec["BC"][(1, 1)] == 3


def test_flag_invariant_decomposition():
    D = realized("flag-su3-invariant").complex
    Z = zigzag_decompose(D)
    assert Z.count("square") == 1
    assert Z.count() == Z.count("square") + Z.count("dot")
    assert decomposition_dims(Z) == direct_cohomology_dims(D)


def test_decomposition_covers_every_bidegree():
    rng = random.Random(3)
    for _ in range(20):
        D = random_complex(rng)
        Z = zigzag_decompose(D)
        covered: dict = {}
        for s, m in Z.items():
            for bd in s.bidegrees:
                covered[bd] = covered.get(bd, 0) + m
        assert covered == dict(D.dims)


def test_corpus_decomposition_oracle():
    for name in ("kodaira-thurston", "filiform", "iwasawa-sub", "calabi-eckmann", "flag-su3-invariant"):
        D = realized(name).complex
        assert decomposition_dims(zigzag_decompose(D)) == direct_cohomology_dims(D), name


# -- E1-isomorphisms ----------------------------------------------------------

def test_identity_and_zero_maps(kt):
    assert e1_iso_check(identity_map(kt.complex)).is_iso
    v = e1_iso_check(zero_map(kt.complex, kt.complex))
    assert not v.is_iso and v.witness is not None


def test_hopf_quotient_is_e1_iso_and_induces_bc_a_isos():
    mf = parse_map(corpus.read("hopf-to-quotient.map"))
    f = CbbaMorphism.from_polys(build(corpus.read(mf.source)), build(corpus.read(mf.target)), mf.images)
    F, RS, RT = f.complex_map(6)
    v = e1_iso_check(F)
    assert v.is_iso and v.window == 4
    for th in ("BC", "A"):
        for p, q in set(RS.complex.support) | set(RT.complex.support):
            if p + q <= v.window:
                M, hs, ht = F.induced(th, p, q)
                assert hs.dim == ht.dim == M.rank(), (th, p, q)


def test_non_commuting_map_detected():
    D = DoubleComplex.zigzag([(0, 0), (1, 0)])
    F = ComplexMap(D, D, {(0, 0): Matrix.identity(1), (1, 0): Matrix.identity(1).scale(ONE + ONE)})
    assert F.commutation_failures()


def test_corpus_maps_are_weak_equivalences():
    for name in ("hopf-to-quotient.map", "flag-to-invariant.map"):
        mf = parse_map(corpus.read(name))
        f = CbbaMorphism.from_polys(build(corpus.read(mf.source)), build(corpus.read(mf.target)), mf.images)
        assert is_weak_equivalence(f).is_weak_equivalence, name
