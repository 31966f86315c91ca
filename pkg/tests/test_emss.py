"""Simplicial bicomplex, filtered S-complexes, spectral sequence pages and their Massey products."""

from __future__ import annotations

import pytest

from bba import corpus
from bba.cbba import build
from bba.errors import InputError, NotDefinedOnPage, ResourceGuard
from bba.massey import VANISHES, triple_derham
from bba.emss import FunctorChoice, apply_functor, pages, simplices, simplicial_bicomplex, ss_massey

KT = build(corpus.read("kodaira-thurston"))
IW = build(corpus.read("iwasawa-sub"))


def key(A, s):
    (k,) = A.parse(s).terms
    return k


def test_simplices():
    assert simplices(2, -1) == [()]
    assert simplices(2, 1) == [(0, 1), (0, 2), (1, 2)]
    assert simplices(1, 1) == [(0, 1)]
    assert simplices(3, 4) == []


def test_delta_on_one_simplex():
    C = simplicial_bicomplex(KT, 1)
    t = (key(KT, "x"), key(KT, "xbar"), key(KT, "y"))
    got = C.delta_terms((0, 1), t)
    ab = KT.parse("x*xbar")
    bc = KT.parse("xbar*y")
    (kab, cab), = ab.terms.items()
    (kbc, cbc), = bc.terms.items()
    assert got == {((1,), (kab, t[2])): cab, ((0,), (t[0], kbc)): -cbc}


def test_delta_squares_to_zero():
    C = simplicial_bicomplex(KT, 2)
    ks = [key(KT, s) for s in ("x", "y", "xbar", "ybar")]
    once = C.delta(2, {(0, 1, 2): {tuple(ks): 1}})
    assert once
    assert C.delta(1, once) == {}


def test_total_differential_squares_to_zero():
    F = apply_functor(simplicial_bicomplex(KT, 1), "total")
    for t in range(1, 4):
        assert (F.D(t + 1) @ F.D(t)).is_zero(), t


def test_pages_are_homology_and_converge():
    S = pages(apply_functor(simplicial_bicomplex(KT, 1), "total"), 3)
    F = S.F
    for t in range(1, 5):
        for p in F.p_range:
            for r in (1, 2):
                assert not S.check_page(r, p, t + p), (r, p, t)
        # Δ¹ has three columns, so d_r = 0 for r >= 3
        assert sum(S.dim(3, p, t + p) for p in F.p_range) == S.total_homology_dim(t)


def test_functor_choice_parsing():
    assert str(FunctorChoice.parse("schweitzer:2,1")) == "schweitzer:2,1"
    assert FunctorChoice.parse(" total ") == FunctorChoice("total")
    for bad in ("schweitzer:1", "schweitzer:a,b", "dolbeault"):
        with pytest.raises(InputError):
            FunctorChoice.parse(bad)


def test_schweitzer_index_of():
    S = FunctorChoice.parse("schweitzer:2,2")
    assert S.index_of((2, 2)) == 1 and S.index_of((1, 1)) == 0
    with pytest.raises(InputError):
        S.index_of((2, 1))


def test_two_fold_product_is_the_product():
    P = KT.parse
    s = ss_massey(KT, [P("x"), P("xbar")], "total")
    assert s.representative == P("x*xbar") and s.vanishes


def test_three_fold_total_matches_de_rham():
    P = KT.parse
    ins = [P("x"), P("xbar"), P("xbar")]
    s = ss_massey(KT, ins, "total")
    r = triple_derham(KT, *ins)
    assert s.representative == P("xbar*ybar")
    assert s.contains(r.representative) and s.contains(r.alt_representative or r.representative)
    assert s.vanishes == (r.verdict == VANISHES)


def test_three_fold_schweitzer_on_iwasawa():
    P = IW.parse
    s = ss_massey(IW, [P("a"), P("a"), P("b")], "schweitzer:3,3")
    assert s.representative == -P("ac") and not s.vanishes


def test_errors():
    P = KT.parse
    with pytest.raises(InputError, match="not a cocycle"):
        ss_massey(KT, [P("y"), P("x"), P("x")], "total")
    with pytest.raises(InputError):
        ss_massey(KT, [P("x")], "total")
    with pytest.raises(InputError):
        ss_massey(KT, [P("x") + P("xbar"), P("x")], "total")
    with pytest.raises(NotDefinedOnPage):
        ss_massey(KT, [P("x"), P("x"), P("xbar*y")], "total")
    with pytest.raises(ResourceGuard):
        ss_massey(KT, [P("x"), P("xbar"), P("xbar")], "total", guard=10)
