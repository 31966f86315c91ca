"""Acceptance criteria 1-10; the terminal summary prints one PASS/FAIL line each.

Every comparison is exact equality over Q(i).
"""

from __future__ import annotations

import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bba import corpus
from bba.bicomplex import (
    cohomology, cohomology_dims, decomposition_dims, direct_cohomology_dims, zigzag_decompose,
)
from bba.cbba import CbbaMorphism, build, is_weak_equivalence
from bba.cli import main
from bba.emss import ss_massey
from bba.errors import UndefinedProduct
from bba.formality import (
    ORTHONORMAL, Arrow, FormalityCertificate, abc_geometric_check, blowup_bc_dims, ddbar_check,
    harmonic, harmonic_consistency, product_span, total, verify_formality_certificate,
)
from bba.formats import parse_map
from bba.massey import NONVANISHING, VANISHES, pullback_check, quadruple_abc, triple_abc, triple_dolbeault, triple_derham
from bba.verify import verify

from builders import random_complex, schweitzer_class

ALGEBRAS = ["kodaira-thurston", "filiform", "hopf", "hopf-quotient", "calabi-eckmann",
            "flag-su3", "flag-su3-invariant", "iwasawa-sub"]
INFINITE_BOUND = 6


def load(name):
    return build(corpus.read(name))


def realize(A):
    return A.realize(None if A.top_degree is not None else INFINITE_BOUND)


def run_cli(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def morphism_from_file(name):
    mf = parse_map(corpus.read(name))
    return CbbaMorphism.from_polys(load(mf.source), load(mf.target), mf.images)


# ---------------------------------------------------------------------------
# 1. filiform quadruple product

@pytest.fixture(scope="module")
def filiform():
    return load("filiform")


@pytest.mark.criterion(1)
def test_filiform_prerequisite_triples_vanish(filiform):
    P = filiform.parse
    for ins in (("x", "x*ybar", "y*xbar"), ("x", "x", "x*ybar")):
        r = triple_abc(filiform, *map(P, ins))
        assert r.verdict == VANISHES, ins
        assert verify(r).ok


@pytest.mark.criterion(1)
def test_filiform_quadruple_nonvanishing(filiform):
    P = filiform.parse
    r = quadruple_abc(filiform, P("x"), P("x"), P("x*ybar"), P("y*xbar"))
    assert r.verdict == NONVANISHING
    assert r.bidegree == (4, 2)
    assert verify(r).ok
    R = filiform.realize(r.bound)
    xwz = P("x*w*zbar")
    # nonzero class in H^{-1}(S_{4,2}); the computed representative is exactly -x w zbar
    closed, exact = schweitzer_class(R, (4, 2), -1, xwz)
    assert closed and not exact
    assert r.representative == -xwz


@pytest.mark.criterion(1)
def test_filiform_quadruple_cli(capsys):
    code, rep = run_cli(capsys, "massey4", "filiform.alg", "[x]", "[x]", "[x*ybar]", "[y*xbar]", "--verify")
    assert code == 0
    assert rep["result"]["verdict"] == "nonvanishing"
    assert rep["result"]["verification"]["ok"]
    F = load("filiform")
    assert F.parse(rep["result"]["representative"]) == -F.parse("x*w*zbar")


# ---------------------------------------------------------------------------
# 2. Iwasawa sub-cbba

@pytest.mark.criterion(2)
def test_iwasawa_ddbar_and_triple():
    A = load("iwasawa-sub")
    v = ddbar_check(A.realize(None).complex)
    assert v.holds and all(v.per_bidegree.values())
    r = triple_abc(A, A.parse("a"), A.parse("a"), A.parse("b"))
    assert r.verdict == NONVANISHING
    assert verify(r).ok


@pytest.mark.criterion(2)
def test_iwasawa_cli(capsys):
    code, rep = run_cli(capsys, "ddbar", "iwasawa-sub.alg")
    assert code == 0 and rep["result"]["holds"]
    code, rep = run_cli(capsys, "massey3", "iwasawa-sub.alg", "[a]", "[a]", "[b]", "--verify")
    assert code == 0 and rep["result"]["verdict"] == "nonvanishing"
    assert rep["result"]["verification"]["ok"]


# ---------------------------------------------------------------------------
# 3. Kodaira-Thurston

@pytest.mark.criterion(3)
def test_kt_dolbeault_triple():
    A = load("kodaira-thurston")
    P = A.parse
    r = triple_dolbeault(A, P("x"), P("xbar"), P("xbar"))
    assert r.verdict == NONVANISHING
    assert r.representative == P("y*xbar")
    assert verify(r).ok


@pytest.mark.criterion(3)
def test_kt_geoformal_and_ddbar(capsys):
    A = load("kodaira-thurston")
    assert abc_geometric_check(A, ORTHONORMAL).holds
    assert not ddbar_check(A.realize(None).complex).holds
    code, rep = run_cli(capsys, "geoformal", "kodaira-thurston.alg")
    assert code == 0 and rep["result"]["holds"]
    code, rep = run_cli(capsys, "ddbar", "kodaira-thurston.alg")
    assert code == 0 and not rep["result"]["holds"]


# ---------------------------------------------------------------------------
# 4. Hopf

@pytest.mark.criterion(4)
def test_hopf_weak_formality():
    f = morphism_from_file("hopf-to-quotient.map")
    v = is_weak_equivalence(f)
    assert v.is_weak_equivalence
    D = realize(f.target).complex
    assert all(D.ddbar(p, q).is_zero() for p, q in D.support)
    verdict = verify_formality_certificate(FormalityCertificate(f.source, (Arrow(f),), "weak"))
    assert verdict.accepted, verdict.issues


@pytest.mark.criterion(4)
def test_hopf_cli(capsys):
    code, rep = run_cli(capsys, "weak-equiv", "hopf-to-quotient.map")
    assert code == 0 and rep["result"]["is_weak_equivalence"]


# ---------------------------------------------------------------------------
# 5. flag manifold

@pytest.mark.criterion(5)
def test_flag_weak_equivalence(capsys):
    f = morphism_from_file("flag-to-invariant.map")
    assert is_weak_equivalence(f).is_weak_equivalence
    code, rep = run_cli(capsys, "weak-equiv", "flag-to-invariant.map")
    assert code == 0 and rep["result"]["is_weak_equivalence"]


@pytest.mark.criterion(5)
def test_flag_tables_match_decomposition():
    D = load("flag-su3-invariant").realize(None).complex
    Z = zigzag_decompose(D)
    rec = decomposition_dims(Z)
    for th in ("BC", "A"):
        direct = {k: v for k, v in cohomology_dims(D, th).items() if v}
        assert {k: v for k, v in rec[th].items() if v} == direct


@pytest.mark.criterion(5)
def test_flag_geoformal_fails():
    A = load("flag-su3-invariant")
    assert not abc_geometric_check(A).holds
    H = harmonic(A)
    span = product_span(H, "BC", (1, 1), (1, 1))
    assert span.dim == 3
    assert cohomology(A.realize(None).complex, "BC", 2, 2).dim < 3


# ---------------------------------------------------------------------------
# 6. spectral-sequence agreement

def _bc_basis(A):
    R = A.realize(None)
    out = []
    for bd in sorted(R.complex.support):
        if bd == (0, 0):
            continue
        for cl in cohomology(R.complex, "BC", *bd).classes():
            out.append(R.element(bd, cl.representative))
    return out


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name", ["kodaira-thurston", "iwasawa-sub"])
def test_spectral_sequence_agreement(name):
    A = load(name)
    basis = _bc_basis(A)
    checked = 0
    for a, b, c in itertools.product(basis, repeat=3):
        bds = [e.bidegree() for e in (a, b, c)]
        if sum(p + q for p, q in bds) - 1 > A.top_degree:
            continue
        center = (sum(p for p, _ in bds), sum(q for _, q in bds))
        for kind in ("derham", "abc"):
            try:
                r = (triple_derham if kind == "derham" else triple_abc)(A, a, b, c)
            except UndefinedProduct:
                continue
            functor = "total" if kind == "derham" else f"schweitzer:{center[0]},{center[1]}"
            s = ss_massey(A, [a, b, c], functor)
            rep = r.representative if kind == "derham" else r.alt_representative
            assert s.contains(rep), (kind, str(a), str(b), str(c))
            checked += 1
    assert checked > 0


# ---------------------------------------------------------------------------
# 7. oracle equivalence on random complexes

@pytest.mark.criterion(7)
def test_random_complexes_decomposition_oracle():
    for seed in range(50):
        D = random_complex(random.Random(seed), max_dim=24)
        assert sum(D.dims.values()) <= 24
        Z = zigzag_decompose(D)
        assert decomposition_dims(Z) == direct_cohomology_dims(D), seed
        assert ddbar_check(D).holds == Z.only_squares_and_dots(), seed


# ---------------------------------------------------------------------------
# 8. Hodge consistency

@pytest.mark.criterion(8)
@pytest.mark.parametrize("name", ALGEBRAS)
def test_hodge_consistency(name):
    A = load(name)
    H = harmonic(realize(A))
    assert harmonic_consistency(H) == []
    D = H.complex
    for th in ("BC", "A"):
        for (p, q), n in H.dims(th).items():
            if D.in_window(p, q):
                assert n == cohomology(D, th, p, q).dim


# ---------------------------------------------------------------------------
# 9. invariance under weak equivalences

def _scaling(A, weights):
    return CbbaMorphism(A, A, {n: A.parse(n).scale(c) for n, c in weights.items()})


def _nonvanishing_products():
    KT = load("kodaira-thurston")
    I = load("iwasawa-sub")
    F = load("filiform")
    kt_scale = {"x": 2, "xbar": 2, "y": 4, "ybar": 4}
    iw_scale = {"a": 2, "b": 2, "c": 4, "v": 4, "vb": 4, "ab": 4, "ac": 8, "bc": 8, "abc": 16}
    fi_scale = {"x": 2, "xbar": 2, "y": 2, "ybar": 2, "z": 4, "zbar": 4, "w": 8, "wbar": 8}
    P = KT.parse
    return [
        ("kt-dolbeault", triple_dolbeault(KT, P("x"), P("xbar"), P("xbar")), kt_scale),
        ("kt-derham", triple_derham(KT, P("x"), P("xbar"), P("xbar")), kt_scale),
        ("iwasawa-abc", triple_abc(I, I.parse("a"), I.parse("a"), I.parse("b")), iw_scale),
        ("filiform-abc4", quadruple_abc(F, *map(F.parse, ("x", "x", "x*ybar", "y*xbar"))), fi_scale),
    ]


@pytest.mark.criterion(9)
@pytest.mark.parametrize("which", ["identity", "scaling"])
def test_invariance_under_weak_equivalences(which):
    for label, res, weights in _nonvanishing_products():
        assert res.verdict == NONVANISHING
        A = res.algebra
        f = CbbaMorphism.identity(A) if which == "identity" else _scaling(A, weights)
        assert is_weak_equivalence(f, res.bound).is_weak_equivalence, label
        pb = pullback_check(f, res, res.bound)
        assert pb.mapped_system_ok, (label, pb.issues)
        assert pb.contained, (label, pb.issues)
        assert pb.target_verdict == NONVANISHING, label
        assert pb.verdicts_agree, label


@pytest.mark.criterion(9)
def test_invariance_hopf_pair():
    f = morphism_from_file("hopf-to-quotient.map")
    A = f.source
    P = A.parse
    # y^2 = del dbar(-i z), so <y, y, y> is defined; on the quotient y^2 = 0
    res = triple_abc(A, P("y"), P("y"), P("y"))
    pb = pullback_check(f, res, res.bound)
    assert pb.weak_equivalence
    assert pb.mapped_system_ok and pb.contained, pb.issues
    assert pb.verdicts_agree


# ---------------------------------------------------------------------------
# 10. blow-up bookkeeping

tables = st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 5)), st.integers(0, 4), max_size=12)


@pytest.mark.criterion(10)
@settings(max_examples=200, deadline=None)
@given(X=tables, Z=tables, k=st.integers(2, 6))
def test_blowup_totals(X, Z, k):
    out = blowup_bc_dims(X, Z, k)
    assert total(out) == total(X) + (k - 1) * total(Z)


@pytest.mark.criterion(10)
def test_blowup_point(tmp_path, capsys):
    X = {(0, 0): 1, (1, 1): 1, (2, 2): 1}
    out = blowup_bc_dims(X, {(0, 0): 1}, 2)
    diff = {bd: out.get(bd, 0) - X.get(bd, 0) for bd in set(out) | set(X)}
    assert {bd: d for bd, d in diff.items() if d} == {(1, 1): 1}
    (tmp_path / "X.json").write_text(json.dumps({"0,0": 1, "1,1": 1, "2,2": 1}))
    (tmp_path / "point.json").write_text(json.dumps({"0,0": 1}))
    code, rep = run_cli(capsys, "blowup", "--codim", "2", "--x-dims", str(tmp_path / "X.json"),
                        "--z-dims", str(tmp_path / "point.json"))
    assert code == 0
    assert rep["result"]["dimensions"] == {"0,0": 1, "1,1": 2, "2,2": 1}
