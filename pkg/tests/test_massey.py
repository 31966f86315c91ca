"""Triple and quadruple Massey products, checked against a brute-force sympy oracle."""

from __future__ import annotations

import itertools
import random

import pytest
import sympy

from bba import corpus
from bba.cbba import CbbaMorphism, TableCBBA, build
from bba.errors import InputError, UndefinedProduct
from bba.linalg import Scalar
from bba.massey import (
    NONVANISHING, VANISHES, check_defining_system, pullback_check, quadruple_abc, quadruple_rep,
    triple, triple_abc, triple_derham, triple_dolbeault,
)
from bba.verify import pair, verify

KT = build(corpus.read("kodaira-thurston"))
IW = build(corpus.read("iwasawa-sub"))
FIL = build(corpus.read("filiform"))


# -- sympy oracle -------------------------------------------------------------

def _sym(s: Scalar):
    re, im = s.to_fraction_pair()
    return sympy.Rational(re.numerator, re.denominator) + sympy.I * sympy.Rational(im.numerator, im.denominator)


def _scalar(z) -> Scalar:
    re, im = sympy.nsimplify(z).as_real_imag()
    return Scalar.parse(f"({sympy.Rational(re)} + {sympy.Rational(im)}i)")


class Oracle:
    """Coordinates of a finite cbba by bidegree, with solving done by sympy."""

    def __init__(self, A):
        self.A = A
        self.R = A.realize(None)

    def basis(self, bd):
        return [self.A.basis_element(k) for k in self.R.keys.get(bd, ())]

    def coords(self, e, bd):
        n = self.R.dim(*bd) if bd in self.R.keys else 0
        sp = self.R.sparse(e, bd) if n else {}
        return sympy.Matrix(n, 1, lambda i, _: _sym(sp[i]) if i in sp else 0)

    def op_matrix(self, op, src, dst):
        cols = [self.coords(getattr(b, op)(), dst) for b in self.basis(src)]
        n = len(self.R.keys.get(dst, ()))
        return sympy.Matrix.hstack(*cols) if cols else sympy.zeros(n, 0)

    def combine(self, bd, vec):
        acc = self.A.zero()
        for b, c in zip(self.basis(bd), vec):
            if c != 0:
                acc = acc + b.scale(_scalar(c))
        return acc

    def kernel(self, ops, bd, shifts):
        M = sympy.Matrix.vstack(*[self.op_matrix(op, bd, _add(bd, s)) for op, s in zip(ops, shifts)])
        return [self.combine(bd, v) for v in M.nullspace()]

    def primitive(self, op, target, src, dst):
        M = self.op_matrix(op, src, dst)
        b = self.coords(target, dst)
        if M.cols == 0:
            return None if any(b) else self.A.zero()
        try:
            sol, params = M.gauss_jordan_solve(b)
        except ValueError:
            return None
        return self.combine(src, sol.subs({p: 0 for p in params}))


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


SHIFT = {"d2": (0, 1), "d1": (1, 0), "ddbar": (1, 1)}


def oracle_verdict(O: Oracle, kind, a, b, c, bds):
    """None if undefined, else True iff the product vanishes."""
    prim = "d2" if kind == "dolbeault3" else "ddbar"
    exact = ("d2",) if kind == "dolbeault3" else ("d1", "d2")
    sh = SHIFT[prim]
    ka, kb, kc = bds
    kx, ky = _sub(_add(ka, kb), sh), _sub(_add(kb, kc), sh)
    kout = _sub(_add(_add(ka, kb), kc), sh)
    x = O.primitive(prim, a * b, kx, _add(ka, kb))
    y = O.primitive(prim, b * c, ky, _add(kb, kc))
    if x is None or y is None:
        return None
    s = -1 if sum(ka) % 2 else 1
    rep = a * y - (x * c).scale(Scalar(s if kind == "dolbeault3" else 1))
    span = [a * l for l in O.kernel([prim], ky, [sh])] + [k * c for k in O.kernel([prim], kx, [sh])]
    for op in exact:
        span += [getattr(e, op)() for e in O.basis(_sub(kout, SHIFT[op]))]
    cols = [O.coords(e, kout) for e in span]
    r = O.coords(rep, kout)
    if not cols:
        return not any(r)
    V = sympy.Matrix.hstack(*cols)
    return V.rank() == sympy.Matrix.hstack(V, r).rank()


def closed_classes(O: Oracle, ops, bds):
    out = []
    for bd in bds:
        shifts = [SHIFT[op] for op in ops]
        out += [(e, bd) for e in O.kernel(ops, bd, shifts)]
    return out


@pytest.mark.parametrize("A,kind,bds,cap", [
    (IW, "dolbeault3", [(1, 1), (2, 1)], 6),
    (IW, "abc3", [(1, 1)], 6),
    (KT, "dolbeault3", [(1, 0), (0, 1)], 3),
    (KT, "abc3", [(1, 0), (0, 1), (1, 1)], 4),
], ids=["iwasawa-dolbeault", "iwasawa-abc", "kt-dolbeault", "kt-abc"])
def test_triples_agree_with_oracle(A, kind, bds, cap):
    O = Oracle(A)
    ops = ("d2",) if kind == "dolbeault3" else ("d1", "d2")
    classes = closed_classes(O, ops, bds)
    seen = {VANISHES: 0, NONVANISHING: 0, None: 0}
    for (a, ka), (b, kb), (c, kc) in itertools.product(classes, repeat=3):
        if sum(ka) + sum(kb) + sum(kc) > cap:
            continue
        expect = oracle_verdict(O, kind, a, b, c, (ka, kb, kc))
        try:
            res = triple(kind, A, (a, ka), (b, kb), (c, kc))
        except UndefinedProduct:
            assert expect is None
            seen[None] += 1
            continue
        assert expect is not None
        assert (res.verdict == VANISHES) == expect, (a, b, c)
        assert verify(res).ok
        seen[res.verdict] += 1
    assert seen[VANISHES] + seen[NONVANISHING] > 0, seen


def test_oracle_sees_nonvanishing_somewhere():
    O = Oracle(IW)
    a, b = IW.parse("a"), IW.parse("b")
    assert oracle_verdict(O, "abc3", a, a, b, [(1, 1)] * 3) is False


# -- examples -----------------------------------------------------------------

def test_iwasawa_aba_vanishes():
    P = IW.parse
    r = triple_abc(IW, P("a"), P("b"), P("a"))
    assert r.verdict == VANISHES and verify(r).ok


def test_zero_input_vanishes():
    P = IW.parse
    r = triple_abc(IW, (IW.zero(), (1, 1)), P("a"), P("b"))
    assert r.verdict == VANISHES and verify(r).ok


def test_filiform_xxxx_vanishes():
    x = FIL.parse("x")
    r = quadruple_abc(FIL, x, x, x, x)
    assert r.verdict == VANISHES and verify(r).ok


def test_kt_derham_nonvanishing():
    P = KT.parse
    r = triple_derham(KT, P("x"), P("xbar"), P("xbar"))
    assert r.verdict == NONVANISHING and verify(r).ok


def test_negating_an_input_negates_representative():
    P = IW.parse
    r1 = triple_abc(IW, P("a"), P("a"), P("b"))
    r2 = triple_abc(IW, -P("a"), P("a"), P("b"))
    assert r2.verdict == r1.verdict == NONVANISHING
    assert pair(r1.certificate.functional, r2.representative) == -pair(r1.certificate.functional,
                                                                           r1.representative)


def test_representative_independent_of_defining_system():
    P = IW.parse
    r = triple_abc(IW, P("a"), P("a"), P("b"))
    w = r.certificate.functional
    O = Oracle(IW)
    kx = r.defining_system["x"]
    kers = O.kernel(["ddbar"], (1, 1), [(1, 1)])
    rng = random.Random(5)
    a, b = P("a"), P("b")
    for _ in range(10):
        t = sum((k.scale(Scalar(rng.randint(-3, 3))) for k in kers), IW.zero())
        s = sum((k.scale(Scalar(rng.randint(-3, 3))) for k in kers), IW.zero())
        rep = a * (r.defining_system["y"] + s) - (kx + t) * b
        assert pair(w, rep) == pair(w, r.representative) != Scalar(0)


def test_quadruple_family_representatives_agree_on_functional():
    P = FIL.parse
    r = quadruple_abc(FIL, P("x"), P("x"), P("x*ybar"), P("y*xbar"))
    w = r.certificate.functional
    base, parts = r.extra["family"]
    rng = random.Random(11)
    for _ in range(8):
        cs = [Scalar(rng.randint(-2, 2)) for _ in parts]
        sysm = {s: base[s] + sum((dp[s].scale(c) for c, dp in zip(cs, parts)), FIL.zero()) for s in base}
        assert not check_defining_system("abc4", r.input_elements, sysm)
        rep = quadruple_rep(r.input_elements, r.input_keys, sysm)
        alt = quadruple_rep(r.input_elements, r.input_keys, sysm, alt=True)
        assert alt - rep == (sysm["x"] * sysm["z"]).d()
        assert pair(w, rep) == pair(w, r.representative) != Scalar(0)


# -- errors -------------------------------------------------------------------

def test_undefined_product_names_elements():
    P = KT.parse
    with pytest.raises(UndefinedProduct, match=r"\(x\)\*\(ybar\)"):
        triple_dolbeault(KT, P("x"), P("ybar"), P("x"))


def test_non_closed_input_rejected():
    P = KT.parse
    with pytest.raises(InputError):
        triple_abc(KT, P("y"), P("x"), P("x"))
    with pytest.raises(InputError):
        quadruple_abc(KT, P("y"), P("x"), P("x"), P("x"))


def test_check_defining_system_flags_bad_system():
    P = IW.parse
    r = triple_abc(IW, P("a"), P("a"), P("b"))
    assert not check_defining_system("abc3", r.input_elements, r.defining_system)
    bad = dict(r.defining_system, x=r.defining_system["x"] + P("c"))
    assert check_defining_system("abc3", r.input_elements, bad) == ["ddbar x != ab"]


# -- functoriality ------------------------------------------------------------

def test_pullback_through_identity():
    P = IW.parse
    r = triple_abc(IW, P("a"), P("a"), P("b"))
    pb = pullback_check(CbbaMorphism.identity(IW), r)
    assert pb and pb.weak_equivalence and pb.verdicts_agree


def test_pullback_to_trivial_algebra():
    P = IW.parse
    r = triple_abc(IW, P("a"), P("a"), P("b"))
    f = CbbaMorphism(IW, TableCBBA([], {}, name="trivial"), {})
    pb = pullback_check(f, r)
    assert pb.mapped_system_ok and pb.target_verdict == VANISHES
    assert not pb.weak_equivalence and pb.verdicts_agree is None
