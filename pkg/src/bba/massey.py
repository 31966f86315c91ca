"""Ad hoc Massey products with vanishing verdicts and certificates.

Supported kinds:

``abc3``
    triple ABC product, representative ``αy - xγ`` with ``∂∂̄x = αβ``,
    ``∂∂̄y = βγ``, valued in Aeppli cohomology modulo ``aH_A + H_A c``.
``dolbeault3``
    ``αy - (-1)^{|α|} xγ`` with ``∂̄x = αβ``, ``∂̄y = βγ``.
``derham3``
    ``xγ - (-1)^{|α|} αy`` with ``dx = αβ``, ``dy = βγ`` in total degree.
``abc4``
    quadruple ABC product in ``H^{-1}`` of the Schweitzer complex.

Triple verdicts are exact.  The quadruple representative set is the image of
an affine-quadratic map, so its verdict may be ``undetermined``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .bicomplex import schweitzer, schweitzer_components, total_complex
from .cbba import CBBA, CbbaMorphism, Element, Realization, is_weak_equivalence
from .errors import BBAError, InputError, NeedsCertificate, UndefinedProduct
from .linalg import ONE, ZERO, Matrix, Scalar, Subspace, image, kernel, solve_affine, span_sum

VANISHES = "vanishes"
NONVANISHING = "nonvanishing"
UNDETERMINED = "undetermined"

KINDS = ("abc3", "dolbeault3", "derham3", "abc4")


# ---------------------------------------------------------------------------
# coordinate contexts

class _BiCtx:
    """Coordinates in single bidegrees of a realization."""

    mode = "bi"

    def __init__(self, R: Realization):
        self.R = R
        self.A = R.algebra
        self.D = R.complex

    def key(self, a: Element, given=None):
        if given is not None:
            return tuple(given)
        bd = a.bidegree()
        if bd is None:
            raise InputError(f"class representative {a} must be of pure bidegree (give it explicitly if zero)")
        return bd

    @staticmethod
    def plus(k1, k2):
        return (k1[0] + k2[0], k1[1] + k2[1])

    @staticmethod
    def minus(k1, k2):
        return (k1[0] - k2[0], k1[1] - k2[1])

    @staticmethod
    def degree(k) -> int:
        return k[0] + k[1]

    def dim(self, k) -> int:
        return self.R.dim(*k)

    def vec(self, a: Element, k) -> dict:
        return self.R.sparse(a, k) if a else {}

    def elem(self, k, v) -> Element:
        return self.R.element(k, v)

    def op(self, name: str, k) -> Matrix:
        if name == "d1":
            return self.D.d1(*k)
        if name == "d2":
            return self.D.d2(*k)
        if name == "ddbar":
            return self.D.ddbar(*k)
        raise BBAError(f"operator {name} unavailable in bidegree mode")

    SHIFT = {"d1": (1, 0), "d2": (0, 1), "ddbar": (1, 1)}

    def left(self, a: Element, k) -> Matrix:
        if not a:
            return None
        return self.R.mult_matrix(a, k)

    def right(self, a: Element, k) -> Matrix:
        if not a:
            return None
        return self.R.mult_matrix(a, k, right=True)

    def apply(self, name: str, a: Element) -> Element:
        if name == "d1":
            return a.d1()
        if name == "d2":
            return a.d2()
        if name == "ddbar":
            return a.ddbar()
        return a.d()

    def in_range(self, k) -> bool:
        return self.R.in_range(self.degree(k))


class _TotCtx(_BiCtx):
    """Coordinates in total degrees (direct sums of bidegrees)."""

    mode = "total"
    SHIFT = {"d": 1}

    def __init__(self, R: Realization):
        super().__init__(R)
        self.T = total_complex(self.D)

    def key(self, a: Element, given=None):
        if given is not None:
            return int(given)
        degs = {self.A.key_degree(k) for k in a.terms}
        if len(degs) != 1:
            raise InputError(f"class representative {a} must be homogeneous in total degree")
        return degs.pop()

    @staticmethod
    def plus(k1, k2):
        return k1 + k2

    @staticmethod
    def minus(k1, k2):
        return k1 - k2

    @staticmethod
    def degree(k) -> int:
        return k

    def dim(self, k) -> int:
        return self.T.dims.get(k, 0)

    def vec(self, a: Element, k) -> dict:
        out = {}
        offs = self.T.offsets(k)
        for bd, part in a.homogeneous_parts().items():
            if bd not in offs:
                raise BBAError(f"{a} has a part outside total degree {k}")
            for i, c in self.R.sparse(part, bd).items():
                out[offs[bd] + i] = c
        return out

    def elem(self, k, v) -> Element:
        if not isinstance(v, dict):
            v = {i: c for i, c in enumerate(v) if c}
        acc = self.A.zero()
        offs = self.T.offsets(k)
        for bd, off in offs.items():
            n = self.R.dim(*bd)
            part = {i - off: c for i, c in v.items() if off <= i < off + n}
            if part:
                acc = acc + self.R.element(bd, part)
        return acc

    def op(self, name: str, k) -> Matrix:
        if name != "d":
            raise BBAError(f"operator {name} unavailable in total-degree mode")
        return self.T.differential(k)

    def _mult(self, a: Element, k, right: bool) -> Matrix:
        if not a:
            return None
        ka = self.key(a)
        src = self.T.offsets(k)
        tgt_deg = k + ka
        tgt = self.T.offsets(tgt_deg)
        rows = [{} for _ in range(self.dim(tgt_deg))]
        for bd, off in src.items():
            for abd, part in a.homogeneous_parts().items():
                tb = (bd[0] + abd[0], bd[1] + abd[1])
                if tb not in tgt:
                    continue
                M = self.R.mult_matrix(part, bd, right=right)
                for i, r in enumerate(M.rows):
                    for j, c in r.items():
                        rows[tgt[tb] + i][off + j] = c
        return Matrix._trusted(len(rows), self.dim(k), rows)

    def left(self, a, k):
        return self._mult(a, k, False)

    def right(self, a, k):
        return self._mult(a, k, True)


class _LinSys:
    """Block linear system assembled from named variable and equation blocks."""

    def __init__(self):
        self.vars: list[tuple[str, int]] = []
        self.eqs: list[tuple[str, int]] = []
        self.blocks: dict[tuple[str, str], Matrix] = {}
        self.b: dict[str, dict] = {}

    def var(self, name, dim):
        self.vars.append((name, dim))

    def eq(self, name, dim):
        self.eqs.append((name, dim))

    def add(self, eq, var, M: Matrix | None, sign=1):
        if M is None:
            return
        if sign < 0:
            M = -M
        key = (eq, var)
        self.blocks[key] = self.blocks[key] + M if key in self.blocks else M

    def rhs(self, eq, v: dict):
        self.b[eq] = v

    def _offsets(self, items):
        out, off = {}, 0
        for n, d in items:
            out[n] = off
            off += d
        return out, off

    def matrix(self) -> tuple[Matrix, dict]:
        vo, nv = self._offsets(self.vars)
        eo, ne = self._offsets(self.eqs)
        rows = [{} for _ in range(ne)]
        for (e, v), M in self.blocks.items():
            for i, r in enumerate(M.rows):
                row = rows[eo[e] + i]
                for j, c in r.items():
                    row[vo[v] + j] = row[vo[v] + j] + c if vo[v] + j in row else c
        rows = [{j: c for j, c in r.items() if c} for r in rows]
        b = {}
        for e, v in self.b.items():
            for i, c in v.items():
                if c:
                    b[eo[e] + i] = c
        return Matrix._trusted(ne, nv, rows), b

    def split(self, x) -> dict[str, dict]:
        vo, _ = self._offsets(self.vars)
        out = {n: {} for n, _ in self.vars}
        dims = dict(self.vars)
        items = x.items() if isinstance(x, dict) else enumerate(x)
        for i, c in items:
            if not c:
                continue
            for n, off in vo.items():
                if off <= i < off + dims[n]:
                    out[n][i - off] = c
                    break
        return out


def _sign(k: int) -> Scalar:
    return ONE if k % 2 == 0 else -ONE


def _first_nonzero_functional(V: Subspace, r: dict):
    """A row of the annihilator of V pairing nontrivially with r."""
    A = V.annihilator_matrix()
    for row in A.rows:
        acc = ZERO
        for j, c in row.items():
            x = r.get(j)
            if x:
                acc = acc + c * x
        if acc:
            return row
    return None


# ---------------------------------------------------------------------------
# results and certificates

@dataclass(frozen=True)
class VanishingCertificate:
    """An explicit defining system whose output is zero."""

    system: Mapping[str, Element]


@dataclass(frozen=True)
class NonvanishingCertificate:
    """A functional on the output space separating 0 from all representatives.

    ``functional`` maps basis keys of the output to coefficients.
    ``multipliers`` show that the functional kills the indeterminacy terms:
    for each name ``m``, ``functional(T_m(u)) = multiplier_m(P(u))`` for
    every ``u`` (``T_m`` a multiplication map, ``P`` the primitive operator).
    """

    functional: Mapping
    multipliers: Mapping[str, Mapping] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class MasseyResult:
    kind: str
    inputs: tuple[str, ...]
    input_elements: tuple[Element, ...]
    input_keys: tuple
    bidegree: object  # output degree key
    representative: Element
    verdict: str
    certificate: object
    defining_system: Mapping[str, Element]
    normal_form: Element
    class_normal_form: Element
    indeterminacy_dim: int
    ambient_dim: int
    alt_representative: Element | None = None
    bound: int | None = None
    seed: int | None = None
    notes: tuple[str, ...] = ()
    extra: Mapping = field(default_factory=dict)

    @property
    def algebra(self) -> CBBA:
        return self.representative.algebra


def _as_inputs(ctx, items) -> tuple[list[Element], list]:
    els, keys = [], []
    for it in items:
        if isinstance(it, tuple):
            a, k = it
        else:
            a, k = it, None
        if isinstance(a, str):
            a = ctx.A.parse_class(a)
        els.append(a)
        keys.append(ctx.key(a, k))
    return els, keys


def _context(A: CBBA, mode: str, needed_degree: int, N: int | None) -> _BiCtx:
    bound = N if N is not None else A.default_bound(needed_degree)
    R = A.realize(bound)
    return _TotCtx(R) if mode == "total" else _BiCtx(R)


_TRIPLE = {
    "abc3": dict(mode="bi", prim="ddbar", closed=("d1", "d2"), exact=("d1", "d2")),
    "dolbeault3": dict(mode="bi", prim="d2", closed=("d2",), exact=("d2",)),
    "derham3": dict(mode="total", prim="d", closed=("d",), exact=("d",)),
}


def _input_degree_sum(A: CBBA, items) -> int:
    tot = 0
    for it in items:
        a = it[0] if isinstance(it, tuple) else it
        k = it[1] if isinstance(it, tuple) else None
        if isinstance(a, str):
            a = A.parse_class(a)
        if k is not None:
            tot += k if isinstance(k, int) else sum(k)
        elif a:
            tot += max(A.key_degree(t) for t in a.terms)
    return tot


def _triple(kind: str, A: CBBA, a, b, c, N: int | None, labels=None) -> MasseyResult:
    spec = _TRIPLE[kind]
    ctx = _context(A, spec["mode"], _input_degree_sum(A, (a, b, c)), N)
    (al, be, ga), (ka, kb, kc) = _as_inputs(ctx, (a, b, c))
    for name, el, k in (("a", al, ka), ("b", be, kb), ("c", ga, kc)):
        for op in spec["closed"]:
            if ctx.apply(op, el):
                raise InputError(f"input {name} = {el} is not closed under {op}")
    prim = spec["prim"]
    shift = ctx.SHIFT[prim]
    kab, kbc = ctx.plus(ka, kb), ctx.plus(kb, kc)
    kx, ky = ctx.minus(kab, shift), ctx.minus(kbc, shift)
    kout = ctx.minus(ctx.plus(kab, kc), shift)

    def primitive(target: Element, k_target, k_src, which):
        P = ctx.op(prim, k_src)
        sol = solve_affine(P, ctx.vec(target, k_target)) if ctx.dim(k_src) or not target else None
        if sol is None or not sol.feasible:
            raise UndefinedProduct(f"{which} is not zero in cohomology, so the product is undefined")
        return ctx.elem(k_src, sol.particular), sol.kernel

    x, Kx = primitive(al * be, kab, kx, f"({al})*({be})")
    y, Ky = primitive(be * ga, kbc, ky, f"({be})*({ga})")
    s_a = _sign(ctx.degree(ka))
    if kind == "abc3":
        rep = al * y - x * ga
        alt = x * ga - al * y
    elif kind == "dolbeault3":
        rep = al * y - (x * ga).scale(s_a)
        alt = None
    else:
        rep = x * ga - (al * y).scale(s_a)
        alt = None

    n_out = ctx.dim(kout)
    r = ctx.vec(rep, kout)
    # indeterminacy: α·ker P + ker P·γ + exact part
    left_a = ctx.left(al, ky)
    right_g = ctx.right(ga, kx)
    exact_sub = Subspace.zero(n_out)
    exact_srcs = []
    for op in spec["exact"]:
        src = ctx.minus(kout, ctx.SHIFT[op])
        exact_srcs.append((op, src))
        exact_sub = span_sum(exact_sub, image(ctx.op(op, src)))
    I = exact_sub
    if left_a is not None:
        I = span_sum(I, image(left_a, Ky))
    if right_g is not None:
        I = span_sum(I, image(right_g, Kx))

    system = {"x": x, "y": y}
    if I.contains(r):
        verdict = VANISHES
        # explicit system: x+t, y+s with α s - t γ exact-part = -r
        L = _LinSys()
        L.var("s", ctx.dim(ky))
        L.var("t", ctx.dim(kx))
        for op, src in exact_srcs:
            L.var("e_" + op, ctx.dim(src))
        L.eq("Ps", ctx.dim(ctx.plus(ky, shift)))
        L.eq("Pt", ctx.dim(ctx.plus(kx, shift)))
        L.eq("r", n_out)
        L.add("Ps", "s", ctx.op(prim, ky))
        L.add("Pt", "t", ctx.op(prim, kx))
        _add_rep_variation(kind, L, left_a, right_g, s_a)
        for op, src in exact_srcs:
            L.add("r", "e_" + op, ctx.op(op, src), sign=-1)
        L.rhs("r", {i: -c for i, c in r.items()})
        M, bvec = L.matrix()
        sol = solve_affine(M, bvec)
        assert sol.feasible, "indeterminacy membership without an explicit system"
        parts = L.split(sol.particular)
        x2 = x + ctx.elem(kx, parts["t"])
        y2 = y + ctx.elem(ky, parts["s"])
        system = {"x": x2, "y": y2}
        for op, src in exact_srcs:
            system["eta_" + op] = ctx.elem(src, parts["e_" + op])
        cert = VanishingCertificate(dict(system))
    else:
        verdict = NONVANISHING
        w = _first_nonzero_functional(I, r)
        mult = {}
        for name, T, k in (("left", left_a, ky), ("right", right_g, kx)):
            if T is not None:
                mu = _multiplier(ctx.op(prim, k), T, w)
                tk = _out_keys(ctx, ctx.plus(k, shift))
                mult[name] = {tk[j]: c for j, c in mu.items()}
        keys_out = _out_keys(ctx, kout)
        cert = NonvanishingCertificate({keys_out[j]: c for j, c in w.items()}, mult)

    nf = ctx.elem(kout, I.reduce(r))
    cnf = ctx.elem(kout, exact_sub.reduce(r))
    names = labels or tuple(str(e) for e in (al, be, ga))
    return MasseyResult(kind, tuple(names), (al, be, ga), (ka, kb, kc), kout, rep, verdict, cert,
                        system, nf, cnf, I.dim, n_out, alt, ctx.R.bound)


def _add_rep_variation(kind, L: _LinSys, left_a, right_g, s_a):
    """Representative change under x -> x+t, y -> y+s."""
    if kind == "abc3":
        L.add("r", "s", left_a)
        L.add("r", "t", right_g, sign=-1)
    elif kind == "dolbeault3":
        L.add("r", "s", left_a)
        L.add("r", "t", right_g, sign=-1 if s_a == ONE else 1)
    else:
        L.add("r", "t", right_g)
        L.add("r", "s", left_a, sign=-1 if s_a == ONE else 1)


def _multiplier(P: Matrix, T: Matrix, w: dict) -> dict:
    """μ with wᵀT = μᵀP, certifying that w kills T(ker P)."""
    wt = {}
    for i, row in enumerate(T.rows):
        c = w.get(i)
        if c:
            for j, x in row.items():
                wt[j] = wt.get(j, ZERO) + c * x
    sol = solve_affine(P.transpose(), {j: c for j, c in wt.items() if c})
    assert sol.feasible
    return {i: c for i, c in enumerate(sol.particular) if c}


def _out_keys(ctx, k) -> list:
    if ctx.mode == "bi":
        return list(ctx.R.keys.get(k, ()))
    out = []
    for bd in ctx.T.components.get(k, ()):
        out.extend(ctx.R.keys[bd])
    return out


def triple_abc(A: CBBA, a, b, c, N: int | None = None, labels=None) -> MasseyResult:
    """Triple ABC-Massey product ⟨a, b, c⟩ of Bott-Chern classes."""
    return _triple("abc3", A, a, b, c, N, labels)


def triple_dolbeault(A: CBBA, a, b, c, N: int | None = None, labels=None) -> MasseyResult:
    return _triple("dolbeault3", A, a, b, c, N, labels)


def triple_derham(A: CBBA, a, b, c, N: int | None = None, labels=None) -> MasseyResult:
    return _triple("derham3", A, a, b, c, N, labels)


def triple(kind: str, A: CBBA, a, b, c, N: int | None = None, labels=None) -> MasseyResult:
    if kind not in _TRIPLE:
        raise BBAError(f"unknown triple product kind {kind!r}")
    return _triple(kind, A, a, b, c, N, labels)


# ---------------------------------------------------------------------------
# quadruple ABC product

_SLOTS = ("x", "y", "z", "eta", "eta'", "xi", "xi'")


@dataclass(frozen=True, eq=False)
class _Quad:
    """Everything needed to evaluate representatives of ⟨a,b,c,d⟩."""

    ctx: _BiCtx
    inputs: tuple[Element, ...]
    input_keys: tuple
    keys: dict  # slot -> bidegree
    center: tuple[int, int]
    comps: tuple  # S^{-1} components
    sign_a: Scalar
    sign_x: Scalar

    def rep(self, s: Mapping[str, Element]) -> Element:
        al, be, ga, de = self.inputs
        x, z = s["x"], s["z"]
        return ((al * (s["xi"] + s["xi'"])).scale(self.sign_a) - x.d1() * z
                + (x * z.d2()).scale(self.sign_x) + (s["eta"] + s["eta'"]) * de)

    def alt_rep(self, s: Mapping[str, Element]) -> Element:
        al, be, ga, de = self.inputs
        x, z = s["x"], s["z"]
        return ((al * (s["xi"] + s["xi'"])).scale(self.sign_a) + x.d2() * z
                + (x * z.d1()).scale(-self.sign_x) + (s["eta"] + s["eta'"]) * de)

    def quad(self, u1: Element, u3: Element) -> Element:
        return (u1 * u3.d2()).scale(self.sign_x) - u1.d1() * u3

    def svec(self, e: Element) -> dict:
        """Coordinates in S^{-1} = ⊕ comps."""
        out, off = {}, 0
        parts = e.homogeneous_parts()
        for bd in self.comps:
            part = parts.pop(bd, None)
            if part is not None:
                for i, c in self.ctx.R.sparse(part, bd).items():
                    out[off + i] = c
            off += self.ctx.dim(bd)
        if parts:
            raise BBAError("representative has parts outside S^{-1}")
        return out

    def selem(self, v: Mapping) -> Element:
        acc = self.ctx.A.zero()
        off = 0
        for bd in self.comps:
            n = self.ctx.dim(bd)
            part = {i - off: c for i, c in v.items() if off <= i < off + n}
            if part:
                acc = acc + self.ctx.R.element(bd, part)
            off += n
        return acc

    @property
    def sdim(self) -> int:
        return sum(self.ctx.dim(bd) for bd in self.comps)

    def system(self, parts: Mapping[str, dict]) -> dict[str, Element]:
        return {s: self.ctx.elem(self.keys[s], parts.get(s, {})) for s in _SLOTS}


def _quad_setup(A: CBBA, a, b, c, d, N):
    needed = _input_degree_sum(A, (a, b, c, d))
    ctx = _context(A, "bi", needed, N)
    els, ks = _as_inputs(ctx, (a, b, c, d))
    for name, el in zip("abcd", els):
        if el.d1() or el.d2():
            raise InputError(f"input {name} = {el} is not a Bott-Chern cocycle")
    ka, kb, kc, kd = ks
    P = ctx.plus
    M = ctx.minus
    keys = {
        "x": M(P(ka, kb), (1, 1)), "y": M(P(kb, kc), (1, 1)), "z": M(P(kc, kd), (1, 1)),
        "eta": M(P(P(ka, kb), kc), (2, 1)), "eta'": M(P(P(ka, kb), kc), (1, 2)),
        "xi": M(P(P(kb, kc), kd), (2, 1)), "xi'": M(P(P(kb, kc), kd), (1, 2)),
    }
    center = P(P(ka, kb), P(kc, kd))
    comps = schweitzer_components(ctx.D, center[0], center[1], -1)
    q = _Quad(ctx, tuple(els), tuple(ks), keys, center, comps, _sign(sum(ka)), _sign(sum(keys["x"]) + 1))
    return q


def _constraint_system(q: _Quad, homogeneous: bool) -> _LinSys:
    ctx = q.ctx
    al, be, ga, de = q.inputs
    k = q.keys
    L = _LinSys()
    for s in _SLOTS:
        L.var(s, ctx.dim(k[s]))
    kab = ctx.plus(k["x"], (1, 1))
    kbc = ctx.plus(k["y"], (1, 1))
    kcd = ctx.plus(k["z"], (1, 1))
    kabc = ctx.plus(k["eta"], (1, 0))
    kbcd = ctx.plus(k["xi"], (1, 0))
    L.eq("E1", ctx.dim(kab))
    L.eq("E2", ctx.dim(kbc))
    L.eq("E3", ctx.dim(kcd))
    L.eq("E4", ctx.dim(kabc))
    L.eq("E5", ctx.dim(kbcd))
    L.add("E1", "x", ctx.op("ddbar", k["x"]))
    L.add("E2", "y", ctx.op("ddbar", k["y"]))
    L.add("E3", "z", ctx.op("ddbar", k["z"]))
    # x γ - α y - ∂η - ∂̄η' = 0
    L.add("E4", "x", ctx.right(ga, k["x"]))
    L.add("E4", "y", ctx.left(al, k["y"]), sign=-1)
    L.add("E4", "eta", ctx.op("d1", k["eta"]), sign=-1)
    L.add("E4", "eta'", ctx.op("d2", k["eta'"]), sign=-1)
    # y δ - β z - ∂ξ - ∂̄ξ' = 0
    L.add("E5", "y", ctx.right(de, k["y"]))
    L.add("E5", "z", ctx.left(be, k["z"]), sign=-1)
    L.add("E5", "xi", ctx.op("d1", k["xi"]), sign=-1)
    L.add("E5", "xi'", ctx.op("d2", k["xi'"]), sign=-1)
    if not homogeneous:
        L.rhs("E1", ctx.vec(al * be, kab))
        L.rhs("E2", ctx.vec(be * ga, kbc))
        L.rhs("E3", ctx.vec(ga * de, kcd))
    return L


def _boundary(q: _Quad) -> Matrix:
    """The Schweitzer map S^{-2} -> S^{-1} at the product's center."""
    return schweitzer(q.ctx.D, q.center[0], q.center[1], -1, -1).boundary[-2]


def _s2_element(q: _Quad, coords) -> Element:
    comps = schweitzer_components(q.ctx.D, q.center[0], q.center[1], -2)
    acc, off = q.ctx.A.zero(), 0
    for bd in comps:
        n = q.ctx.dim(bd)
        part = {i - off: c for i, c in enumerate(coords) if c and off <= i < off + n}
        if part:
            acc = acc + q.ctx.R.element(bd, part)
        off += n
    return acc


def _obstruction(q: _Quad) -> str:
    ctx = q.ctx
    els = q.inputs
    for label, i, j, slot in (("ab", 0, 1, "x"), ("bc", 1, 2, "y"), ("cd", 2, 3, "z")):
        k = q.keys[slot]
        prod = els[i] * els[j]
        sol = solve_affine(ctx.op("ddbar", k), ctx.vec(prod, ctx.plus(k, (1, 1))))
        if not sol.feasible:
            return f"{label} is not zero in Bott-Chern cohomology"
    ikeys = q.input_keys
    for label, idx in (("<a,b,c>", (0, 1, 2)), ("<b,c,d>", (1, 2, 3))):
        r = triple_abc(ctx.A, *[(els[i], ikeys[i]) for i in idx], N=ctx.R.bound)
        if r.verdict != VANISHES:
            return f"the triple product {label} does not vanish"
    return "no defining system with a common middle primitive exists"


def quadruple_abc(A: CBBA, a, b, c, d, N: int | None = None, seed: int = 0, labels=None) -> MasseyResult:
    """Ad hoc quadruple ABC-Massey product ⟨a, b, c, d⟩ in H^{-1}(S_{p,q})."""
    q = _quad_setup(A, a, b, c, d, N)
    ctx = q.ctx
    L = _constraint_system(q, homogeneous=False)
    M, bvec = L.matrix()
    sol = solve_affine(M, bvec)
    if not sol.feasible:
        raise UndefinedProduct(_obstruction(q))
    base = q.system(L.split(sol.particular))
    R0 = q.rep(base)
    Bmat = _boundary(q)
    B = image(Bmat)
    P_parts = [q.system(L.split(v)) for v in sol.kernel.sparse_basis()]
    n_s = q.sdim
    r0 = q.svec(R0)

    def lin(dp):
        # linear part of R(base + dp) - R(base)
        full = q.rep({s: base[s] + dp[s] for s in _SLOTS})
        return full - R0 - q.quad(dp["x"], dp["z"])

    lin_vecs = [q.svec(lin(dp)) for dp in P_parts]

    def combo(coeffs, slot):
        acc = A.zero()
        for ck, dp in zip(coeffs, P_parts):
            if ck:
                acc = acc + dp[slot].scale(ck)
        return acc

    def try_slice(fix: str, u1=None):
        """Solve R(base + p) ∈ B for p in P with the x-part (or z-part) pinned."""
        S = _LinSys()
        S.var("c", len(P_parts))
        S.var("b", Bmat.ncols)
        S.eq("R", n_s)
        cols = []
        for dp, v in zip(P_parts, lin_vecs):
            v = dict(v)
            if u1 is not None:
                for i, cc in q.svec(q.quad(u1, dp["z"])).items():
                    v[i] = v.get(i, ZERO) + cc
            cols.append({i: cc for i, cc in v.items() if cc})
        S.add("R", "c", Matrix.from_columns(cols, n_s))
        S.add("R", "b", Bmat, sign=-1)
        S.rhs("R", {i: -cc for i, cc in r0.items()})
        slot = "z" if fix == "z" else "x"
        kk = q.keys[slot]
        S.eq("fix", ctx.dim(kk))
        S.add("fix", "c", Matrix.from_columns([ctx.vec(dp[slot], kk) for dp in P_parts], ctx.dim(kk)))
        if u1 is not None:
            S.rhs("fix", ctx.vec(u1, kk))
        Mm, bb = S.matrix()
        s2 = solve_affine(Mm, bb)
        if not s2.feasible:
            return None
        parts = S.split(s2.particular)
        cvec = [parts["c"].get(k2, ZERO) for k2 in range(len(P_parts))]
        found = {s: base[s] + combo(cvec, s) for s in _SLOTS}
        bcoords = [parts["b"].get(k2, ZERO) for k2 in range(Bmat.ncols)]
        return found, bcoords

    slices = [("x", None), ("z", None)]
    if P_parts:
        rng = random.Random(seed)
        slices.append(("rand", combo([Scalar(rng.randint(-3, 3)) for _ in P_parts], "x")))
    hit = None
    for fix, u1 in slices:
        hit = try_slice(fix, u1)
        if hit is not None:
            break

    xs = Subspace(ctx.dim(q.keys["x"]), [ctx.vec(dp["x"], q.keys["x"]) for dp in P_parts])
    zs = Subspace(ctx.dim(q.keys["z"]), [ctx.vec(dp["z"], q.keys["z"]) for dp in P_parts])
    x_basis = [ctx.elem(q.keys["x"], v) for v in xs.sparse_basis()]
    z_basis = [ctx.elem(q.keys["z"], v) for v in zs.sparse_basis()]
    V = span_sum(Subspace(n_s, lin_vecs), B)
    V = span_sum(V, Subspace(n_s, [q.svec(q.quad(e, f)) for e in x_basis for f in z_basis]))
    notes = []
    if hit is not None:
        verdict = VANISHES
        system, bcoords = hit
        rep = q.rep(system)
        cert = VanishingCertificate({**system, "boundary": _s2_element(q, bcoords)})
    elif not V.contains(r0):
        verdict = NONVANISHING
        system, rep = base, R0
        w = _first_nonzero_functional(V, r0)
        keys_out = [k for bd in q.comps for k in ctx.R.keys.get(bd, ())]
        cert = NonvanishingCertificate({keys_out[j]: cc for j, cc in w.items()})
    else:
        verdict = UNDETERMINED
        system, rep, cert = base, R0, None
        notes.append("zero lies in the affine superset but no vanishing defining system was found")
    nf = q.selem(V.reduce_sparse(q.svec(rep)))
    cnf = q.selem(B.reduce_sparse(q.svec(rep)))
    names = labels or tuple(str(e) for e in q.inputs)
    return MasseyResult("abc4", tuple(names), q.inputs, q.input_keys, q.center, rep, verdict, cert,
                        system, nf, cnf, V.dim, n_s, q.alt_rep(system), ctx.R.bound, seed, tuple(notes),
                        {"boundary_dim": B.dim, "variation_dim": len(P_parts), "components": q.comps,
                         "family": (base, tuple(P_parts))})


def quadruple_rep(inputs: Sequence[Element], keys: Sequence, system: Mapping[str, Element],
                  alt: bool = False) -> Element:
    """Representative of a given defining system (primary or alternative form)."""
    al, be, ga, de = inputs
    x, z = system["x"], system["z"]
    sa = _sign(sum(keys[0]))
    sx = _sign(sum(keys[0]) + sum(keys[1]) - 1)
    xi = system["xi"] + system["xi'"]
    eta = system["eta"] + system["eta'"]
    if alt:
        return (al * xi).scale(sa) + x.d2() * z + (x * z.d1()).scale(-sx) + eta * de
    return (al * xi).scale(sa) - x.d1() * z + (x * z.d2()).scale(sx) + eta * de


# ---------------------------------------------------------------------------
# functoriality

@dataclass(frozen=True)
class PullbackVerdict:
    mapped_system_ok: bool
    contained: bool
    source_verdict: str
    target_verdict: str
    weak_equivalence: bool | None
    verdicts_agree: bool | None
    issues: tuple[str, ...] = ()

    def __bool__(self):
        return self.mapped_system_ok and self.contained and self.verdicts_agree is not False


def check_defining_system(kind: str, inputs: Sequence[Element], system: Mapping[str, Element]) -> list[str]:
    """Defining equations of a (mapped) system, checked by substitution."""
    issues = []
    if kind == "abc3":
        al, be, ga = inputs
        x, y = system["x"], system["y"]
        if x.ddbar() != al * be:
            issues.append("ddbar x != ab")
        if y.ddbar() != be * ga:
            issues.append("ddbar y != bc")
    elif kind == "dolbeault3":
        al, be, ga = inputs
        if system["x"].d2() != al * be:
            issues.append("dbar x != ab")
        if system["y"].d2() != be * ga:
            issues.append("dbar y != bc")
    elif kind == "derham3":
        al, be, ga = inputs
        if system["x"].d() != al * be:
            issues.append("d x != ab")
        if system["y"].d() != be * ga:
            issues.append("d y != bc")
    elif kind == "abc4":
        al, be, ga, de = inputs
        s = system
        for n, lhs, rhs in (("x", s["x"].ddbar(), al * be), ("y", s["y"].ddbar(), be * ga),
                            ("z", s["z"].ddbar(), ga * de)):
            if lhs != rhs:
                issues.append(f"ddbar {n} is wrong")
        if s["x"] * ga - al * s["y"] != s["eta"].d1() + s["eta'"].d2():
            issues.append("x c - a y != del eta + dbar eta'")
        if s["y"] * de - be * s["z"] != s["xi"].d1() + s["xi'"].d2():
            issues.append("y d - b z != del xi + dbar xi'")
    return issues


def _rerun(kind, A, inputs, keys, N):
    args = [(e, k) for e, k in zip(inputs, keys)]
    if kind == "abc4":
        return quadruple_abc(A, *args, N=N)
    return triple(kind, A, *args, N=N)


def pullback_check(f: CbbaMorphism, result: MasseyResult, N: int | None = None) -> PullbackVerdict:
    """Push a product's defining system through ``f`` and compare verdicts."""
    if not result.defining_system:
        raise NeedsCertificate("result carries no defining system")
    T = f.target
    m_inputs = [f.apply(e) for e in result.input_elements]
    m_sys = {k: f.apply(v) for k, v in result.defining_system.items() if k != "boundary"}
    issues = check_defining_system(result.kind, m_inputs, m_sys)
    keys = list(result.input_keys)
    target = _rerun(result.kind, T, m_inputs, keys, N)
    mapped_rep = f.apply(result.representative)
    # containment: the mapped representative is a representative in the target
    contained = _represents(target, mapped_rep, m_inputs, m_sys)
    wv = is_weak_equivalence(f, N)
    agree = (result.verdict == target.verdict) if wv.is_weak_equivalence else None
    if result.verdict == VANISHES and target.verdict != VANISHES:
        issues.append("image of a vanishing system does not vanish")
    return PullbackVerdict(not issues, contained, result.verdict, target.verdict,
                           wv.is_weak_equivalence, agree, tuple(issues))


def _represents(target: MasseyResult, rep: Element, inputs, system) -> bool:
    """Does ``rep`` differ from the target's representative by indeterminacy?"""
    A = target.algebra
    if target.kind == "abc4":
        # a mapped system is itself a defining system; its representative is in the set
        return quadruple_rep(inputs, target.input_keys, system) == rep
    diff = rep - target.representative
    if not diff:
        return True
    R = A.realize(target.bound)
    k = target.bidegree
    if target.kind == "derham3":
        ctx = _TotCtx(R)
    else:
        ctx = _BiCtx(R)
    # normal forms modulo the target indeterminacy agree iff diff lies in it
    nf_target = ctx.vec(target.normal_form, k)
    nf_rep = _reduce_like(target, ctx, rep)
    return nf_target == nf_rep


def _reduce_like(target: MasseyResult, ctx, rep: Element) -> dict:
    kind = target.kind
    al, be, ga = target.input_elements
    spec = _TRIPLE[kind]
    prim = spec["prim"]
    shift = ctx.SHIFT[prim]
    ka, kb, kc = target.input_keys
    kx = ctx.minus(ctx.plus(ka, kb), shift)
    ky = ctx.minus(ctx.plus(kb, kc), shift)
    kout = target.bidegree
    I = Subspace.zero(ctx.dim(kout))
    for op in spec["exact"]:
        I = span_sum(I, image(ctx.op(op, ctx.minus(kout, ctx.SHIFT[op]))))
    la, rg = ctx.left(al, ky), ctx.right(ga, kx)
    if la is not None:
        I = span_sum(I, image(la, kernel(ctx.op(prim, ky))))
    if rg is not None:
        I = span_sum(I, image(rg, kernel(ctx.op(prim, kx))))
    return {i: c for i, c in enumerate(I.reduce(ctx.vec(rep, kout))) if c}
