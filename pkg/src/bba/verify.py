"""Independent re-checks of Massey product results.

Every check here works by substitution into the algebra's own product and
differentials, never through the elimination code that produced the result.
Solution spaces the quadruple verdict depends on are recomputed with sympy's
``DomainMatrix`` over ``QQ_I``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from .cbba import Element
from .errors import NeedsCertificate
from .linalg import ZERO, Scalar
from .massey import (NONVANISHING, VANISHES, MasseyResult, NonvanishingCertificate, VanishingCertificate,
                     check_defining_system, quadruple_rep)


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __bool__(self):
        return self.ok

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]


def pair(w: Mapping, e: Element) -> Scalar:
    """Evaluate a functional given on basis keys."""
    acc = ZERO
    for k, c in e.terms.items():
        x = w.get(k)
        if x:
            acc = acc + x * c
    return acc


def _keys(A, bd, bound):
    return A.keys_of_bidegree(bd[0], bd[1], bound)


def _keys_total(A, k, bound):
    return [key for p in range(k + 1) for key in _keys(A, (p, k - p), bound)]


_TRIPLE_OPS = {
    "abc3": ("ddbar", (1, 1), ("d1", "d2")),
    "dolbeault3": ("d2", (0, 1), ("d2",)),
    "derham3": ("d", 1, ("d",)),
}


def _apply(op: str, e: Element) -> Element:
    return {"d1": e.d1, "d2": e.d2, "ddbar": e.ddbar, "d": e.d}[op]()


def _shift(k, s, sign=1):
    if isinstance(k, int):
        return k + sign * s
    return (k[0] + sign * s[0], k[1] + sign * s[1])


def _triple_rep(kind, inputs, keys, s):
    al, be, ga = inputs
    x, y = s["x"], s["y"]
    deg_a = keys[0] if isinstance(keys[0], int) else sum(keys[0])
    sa = Scalar(1) if deg_a % 2 == 0 else Scalar(-1)
    if kind == "abc3":
        return al * y - x * ga
    if kind == "dolbeault3":
        return al * y - (x * ga).scale(sa)
    return x * ga - (al * y).scale(sa)


def verify_triple(res: MasseyResult) -> VerificationReport:
    A = res.algebra
    checks = []
    prim, shift, exact = _TRIPLE_OPS[res.kind]
    issues = check_defining_system(res.kind, res.input_elements, res.defining_system)
    checks.append(Check("defining system", not issues, "; ".join(issues)))
    rep = _triple_rep(res.kind, res.input_elements, res.input_keys, res.defining_system)
    checks.append(Check("representative", rep == res.representative))
    cert = res.certificate
    kout = res.bidegree
    keys_of = (lambda k: _keys_total(A, k, res.bound)) if res.kind == "derham3" else \
        (lambda k: _keys(A, k, res.bound))
    if res.verdict == VANISHES:
        if not isinstance(cert, VanishingCertificate):
            raise NeedsCertificate("vanishing verdict without a defining system")
        s = cert.system
        exact_sum = A.zero()
        for op in exact:
            exact_sum = exact_sum + _apply(op, s["eta_" + op])
        checks.append(Check("exact output", _triple_rep(res.kind, res.input_elements, res.input_keys, s) == exact_sum))
    elif res.verdict == NONVANISHING:
        if not isinstance(cert, NonvanishingCertificate):
            raise NeedsCertificate("nonvanishing verdict without a functional")
        w = cert.functional
        checks.append(Check("separates", bool(pair(w, res.representative))))
        for op in exact:
            if res.kind == "derham3":
                src = kout - 1
            else:
                src = _shift(kout, {"d1": (1, 0), "d2": (0, 1)}[op], -1)
            bad = [k for k in keys_of(src) if pair(w, _apply(op, A.basis_element(k)))]
            checks.append(Check(f"kills im {op}", not bad))
        al, be, ga = res.input_elements
        ka, kb, kc = res.input_keys
        for name, kk, mult in (("left", _shift(_shift(kb, kc), shift, -1), lambda u: al * u),
                               ("right", _shift(_shift(ka, kb), shift, -1), lambda u: u * ga)):
            mu = cert.multipliers.get(name, {})
            bad = [k for k in keys_of(kk)
                   if pair(w, mult(A.basis_element(k))) != pair(mu, _apply(prim, A.basis_element(k)))]
            checks.append(Check(f"{name} multiplier", not bad, f"{len(bad)} mismatches" if bad else ""))
    return VerificationReport(tuple(checks))


# ---------------------------------------------------------------------------
# quadruple

_SLOTS = ("x", "y", "z", "eta", "eta'", "xi", "xi'")


def _qqi(c: Scalar):
    return QQ_I(QQ(int(c.re.numerator), int(c.re.denominator)), QQ(int(c.im.numerator), int(c.im.denominator)))


def _from_sympy(g) -> Scalar:
    re, im = g.x, g.y
    return Scalar(Fraction(int(re.numerator), int(re.denominator)), Fraction(int(im.numerator), int(im.denominator)))


def _slot_keys(res: MasseyResult):
    ka, kb, kc, kd = res.input_keys

    def add(*ks):
        return (sum(k[0] for k in ks), sum(k[1] for k in ks))

    def sub(k, s):
        return (k[0] - s[0], k[1] - s[1])

    return {
        "x": sub(add(ka, kb), (1, 1)), "y": sub(add(kb, kc), (1, 1)), "z": sub(add(kc, kd), (1, 1)),
        "eta": sub(add(ka, kb, kc), (2, 1)), "eta'": sub(add(ka, kb, kc), (1, 2)),
        "xi": sub(add(kb, kc, kd), (2, 1)), "xi'": sub(add(kb, kc, kd), (1, 2)),
    }


def _homogeneous_equations(res: MasseyResult, slot: str, u: Element) -> list[Element]:
    """Contribution of a slot value to the five homogeneous defining equations."""
    al, be, ga, de = res.input_elements
    zero = u.algebra.zero()
    eqs = [zero] * 5
    if slot == "x":
        eqs[0] = u.ddbar()
        eqs[3] = u * ga
    elif slot == "y":
        eqs[1] = u.ddbar()
        eqs[3] = -(al * u)
        eqs[4] = u * de
    elif slot == "z":
        eqs[2] = u.ddbar()
        eqs[4] = -(be * u)
    elif slot == "eta":
        eqs[3] = -u.d1()
    elif slot == "eta'":
        eqs[3] = -u.d2()
    elif slot == "xi":
        eqs[4] = -u.d1()
    else:
        eqs[4] = -u.d2()
    return eqs


def _nullspace(res: MasseyResult, sk: Mapping) -> list[dict[str, Element]]:
    """Kernel of the homogeneous defining equations, via sympy over QQ_I."""
    A = res.algebra
    cols, labels = [], []
    for s in _SLOTS:
        for k in _keys(A, sk[s], res.bound):
            u = A.basis_element(k)
            cols.append(_homogeneous_equations(res, s, u))
            labels.append((s, k))
    row_index = {}
    entries = []
    for j, eqs in enumerate(cols):
        for e_i, e in enumerate(eqs):
            for key, c in e.terms.items():
                i = row_index.setdefault((e_i, key), len(row_index))
                entries.append((i, j, c))
    nr, nc = max(len(row_index), 1), len(cols)
    rows = [[QQ_I.zero] * nc for _ in range(nr)]
    for i, j, c in entries:
        rows[i][j] = _qqi(c)
    M = DomainMatrix(rows, (nr, nc), QQ_I)
    if nc == 0:
        return []
    N = M.nullspace().to_Matrix() if M.rank() < nc else None
    out = []
    if N is None:
        return out
    for r in range(N.rows):
        dp = {s: A.zero() for s in _SLOTS}
        for j in range(nc):
            v = QQ_I.from_sympy(N[r, j])
            if v:
                s, k = labels[j]
                dp[s] = dp[s] + A.basis_element(k).scale(_from_sympy(v))
        out.append(dp)
    return out


def _span_basis(A, items: list[Element]) -> list[Element]:
    """A basis of the span of homogeneous elements, via sympy rref."""
    keys = sorted({k for e in items for k in e.terms}, key=repr)
    if not keys:
        return []
    idx = {k: i for i, k in enumerate(keys)}
    rows = [[QQ_I.zero] * len(keys) for _ in items]
    for r, e in enumerate(items):
        for k, c in e.terms.items():
            rows[r][idx[k]] = _qqi(c)
    M = DomainMatrix(rows, (len(items), len(keys)), QQ_I).rref()[0].to_Matrix()
    out = []
    for r in range(M.rows):
        acc = A.zero()
        for j, k in enumerate(keys):
            v = QQ_I.from_sympy(M[r, j])
            if v:
                acc = acc + A.basis_element(k).scale(_from_sympy(v))
        if acc:
            out.append(acc)
    return out


def _proj_d(res: MasseyResult, comps, m: Element) -> Element:
    """Schweitzer map S^{-2} -> S^{-1}: total differential projected to S^{-1}."""
    acc = m.algebra.zero()
    for bd, part in m.d().homogeneous_parts().items():
        if bd in comps:
            acc = acc + part
    return acc


def verify_quadruple(res: MasseyResult) -> VerificationReport:
    A = res.algebra
    checks = []
    issues = check_defining_system("abc4", res.input_elements, res.defining_system)
    checks.append(Check("defining system", not issues, "; ".join(issues)))
    rep = quadruple_rep(res.input_elements, res.input_keys, res.defining_system)
    checks.append(Check("representative", rep == res.representative))
    alt = quadruple_rep(res.input_elements, res.input_keys, res.defining_system, alt=True)
    x, z = res.defining_system["x"], res.defining_system["z"]
    checks.append(Check("alternative form", alt - rep == (x * z).d()))
    p, q = res.bidegree
    comps = {(p - 2, q - 1), (p - 1, q - 2)}
    s2 = [bd for bd in ((p - 3, q - 1), (p - 2, q - 2), (p - 1, q - 3)) if min(bd) >= 0]
    cert = res.certificate
    if res.verdict == VANISHES:
        if not isinstance(cert, VanishingCertificate):
            raise NeedsCertificate("vanishing verdict without a defining system")
        b = cert.system["boundary"]
        checks.append(Check("boundary", _proj_d(res, comps, b) == rep))
        bad = [bd for bd in b.homogeneous_parts() if bd not in s2]
        checks.append(Check("boundary degree", not bad))
    elif res.verdict == NONVANISHING:
        if not isinstance(cert, NonvanishingCertificate):
            raise NeedsCertificate("nonvanishing verdict without a functional")
        w = cert.functional
        checks.append(Check("separates", bool(pair(w, rep))))
        bad = [k for bd in s2 for k in _keys(A, bd, res.bound)
               if pair(w, _proj_d(res, comps, A.basis_element(k)))]
        checks.append(Check("kills boundary", not bad))
        sk = _slot_keys(res)
        null = _nullspace(res, sk)
        sx = Scalar(1) if (sum(sk["x"]) + 1) % 2 == 0 else Scalar(-1)

        def quad(u1, u3):
            return (u1 * u3.d2()).scale(sx) - u1.d1() * u3

        base = res.defining_system
        bad_lin = 0
        for dp in null:
            moved = {s: base[s] + dp[s] for s in _SLOTS}
            lin = quadruple_rep(res.input_elements, res.input_keys, moved) - rep - quad(dp["x"], dp["z"])
            if pair(w, lin):
                bad_lin += 1
        checks.append(Check("kills linear variation", bad_lin == 0, f"{len(null)} directions"))
        xb = _span_basis(A, [dp["x"] for dp in null if dp["x"]])
        zb = _span_basis(A, [dp["z"] for dp in null if dp["z"]])
        bad_q = sum(1 for e in xb for f in zb if pair(w, quad(e, f)))
        checks.append(Check("kills quadratic variation", bad_q == 0, f"{len(xb)}x{len(zb)} pairs"))
    return VerificationReport(tuple(checks))


def verify(res: MasseyResult) -> VerificationReport:
    if res.kind == "abc4":
        return verify_quadruple(res)
    return verify_triple(res)
