"""∂∂̄-lemma checks, harmonic spaces for a declared metric, ABC-geometric
formality, formality-certificate verification and blow-up bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .bicomplex import DoubleComplex, cohomology
from .cbba import CBBA, CbbaMorphism, Element, Realization, TableCBBA, is_weak_equivalence
from .errors import CodimensionError, InputError, MetricError
from .formats import Generator
from .linalg import Matrix, Subspace, image, intersect, kernel, span_sum
from .massey import NONVANISHING, MasseyResult

Bidegree = tuple[int, int]


# ---------------------------------------------------------------------------
# ∂∂̄-lemma

@dataclass(frozen=True)
class DdbarVerdict:
    holds: bool
    per_bidegree: Mapping[Bidegree, bool]
    witnesses: Mapping[Bidegree, tuple]  # a vector in ker∂ ∩ ker∂̄ ∩ (im∂ + im∂̄) outside im∂∂̄
    window: int | None

    def __bool__(self):
        return self.holds

    @property
    def failures(self) -> list[Bidegree]:
        return sorted(bd for bd, ok in self.per_bidegree.items() if not ok)


def ddbar_check(D: DoubleComplex) -> DdbarVerdict:
    """ker∂ ∩ ker∂̄ ∩ (im∂ + im∂̄) = im∂∂̄ in every bidegree of the window."""
    per, wit = {}, {}
    for (p, q) in D.support:
        if not D.in_window(p, q):
            continue
        n = D.dim(p, q)
        closed = intersect(kernel(D.d1(p, q)), kernel(D.d2(p, q)))
        exact = span_sum(image(D.d1(p - 1, q)), image(D.d2(p, q - 1)))
        lhs = intersect(closed, exact)
        rhs = image(D.ddbar(p - 1, q - 1)) if n else Subspace.zero(0)
        ok = lhs.is_subspace_of(rhs)
        per[(p, q)] = ok
        if not ok:
            wit[(p, q)] = next(v for v in lhs.basis if not rhs.contains(v))
    return DdbarVerdict(all(per.values()), per, wit, D.window)


# ---------------------------------------------------------------------------
# metrics and harmonic spaces

def is_positive_definite(G: Matrix) -> bool:
    """Hermitian with positive real pivots in exact Gaussian elimination."""
    n = G.nrows
    if G.ncols != n or G != G.H:
        return False
    a = [list(r) for r in G.to_dense()]
    for k in range(n):
        piv = a[k][k]
        if piv.im or not piv.re > 0:
            return False
        inv = piv.inverse()
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f:
                for j in range(k, n):
                    a[i][j] = a[i][j] - f * a[k][j]
    return True


@dataclass(frozen=True)
class Metric:
    """Per-bidegree Gram matrices; missing bidegrees use the orthonormal basis."""

    gram: Mapping[Bidegree, Matrix] = field(default_factory=dict)

    def __post_init__(self):
        for bd, G in self.gram.items():
            if not is_positive_definite(G):
                raise MetricError(f"Gram matrix at {bd} is not Hermitian positive definite")

    def at(self, bd: Bidegree, n: int) -> Matrix:
        G = self.gram.get(bd)
        if G is None:
            return Matrix.identity(n)
        if G.shape != (n, n):
            raise MetricError(f"Gram matrix at {bd} has shape {G.shape}, expected {(n, n)}")
        return G


ORTHONORMAL = Metric()


def _adjoint_kernel(T: Matrix, G_target: Matrix) -> Subspace:
    """ker T* for T: V -> W; T* = G_V^{-1} T^H G_W, so ker T* = ker(T^H G_W)."""
    return kernel(T.H @ G_target)


@dataclass(frozen=True, eq=False)
class HarmonicSpaces:
    realization: Realization
    metric: Metric
    bc: Mapping[Bidegree, Subspace]
    a: Mapping[Bidegree, Subspace]

    @property
    def complex(self) -> DoubleComplex:
        return self.realization.complex

    def dims(self, which: str) -> dict[Bidegree, int]:
        tab = self.bc if which == "BC" else self.a
        return {bd: S.dim for bd, S in sorted(tab.items()) if S.dim}

    def elements(self, which: str, bd: Bidegree) -> list[Element]:
        tab = self.bc if which == "BC" else self.a
        S = tab.get(bd)
        if S is None:
            return []
        return [self.realization.element(bd, v) for v in S.sparse_basis()]

    def combined(self, bd: Bidegree) -> Subspace:
        n = self.realization.dim(*bd)
        U = self.bc.get(bd, Subspace.zero(n))
        V = self.a.get(bd, Subspace.zero(n))
        return span_sum(U, V)


def harmonic(A: CBBA | Realization, metric: Metric | None = None, N: int | None = None) -> HarmonicSpaces:
    """Bott-Chern and Aeppli harmonic spaces via adjoints."""
    R = A if isinstance(A, Realization) else A.realize(N)
    m = metric or ORTHONORMAL
    D = R.complex
    bc, aa = {}, {}
    for (p, q) in D.support:
        if not D.in_window(p, q):
            continue
        n = D.dim(p, q)
        G = m.at((p, q), n)
        closed = intersect(kernel(D.d1(p, q)), kernel(D.d2(p, q)))
        bc[(p, q)] = intersect(closed, _adjoint_kernel(D.ddbar(p - 1, q - 1), G))
        co = intersect(_adjoint_kernel(D.d1(p - 1, q), G), _adjoint_kernel(D.d2(p, q - 1), G))
        aa[(p, q)] = intersect(kernel(D.ddbar(p, q)), co)
    return HarmonicSpaces(R, m, bc, aa)


def harmonic_consistency(H: HarmonicSpaces) -> list[str]:
    """Dims equal cohomology dims and harmonic spaces inject into cohomology."""
    issues = []
    D = H.complex
    for bd in sorted(H.bc):
        for which, tab in (("BC", H.bc), ("A", H.a)):
            G = cohomology(D, which, *bd)
            S = tab[bd]
            if S.dim != G.dim:
                issues.append(f"dim H_{which} harmonic {S.dim} != {G.dim} at {bd}")
                continue
            if S.dim and not span_sum(S, G.quotient.modulus).dim == S.dim + G.quotient.modulus.dim:
                issues.append(f"harmonic {which} forms at {bd} meet the coboundaries")
    return issues


# ---------------------------------------------------------------------------
# ABC-geometric formality

@dataclass(frozen=True)
class GeoWitness:
    kind: str  # "product" | "del" | "dbar"
    inputs: tuple[str, ...]
    result: str
    bidegree: Bidegree


@dataclass(frozen=True)
class GeoVerdict:
    holds: bool
    witnesses: tuple[GeoWitness, ...]
    unchecked: tuple[Bidegree, ...] = ()

    def __bool__(self):
        return self.holds


def abc_geometric_check(A: CBBA, metric: Metric | None = None, N: int | None = None,
                        all_witnesses: bool = False) -> GeoVerdict:
    """Is ℋ_A + ℋ_BC closed under multiplication, ∂ and ∂̄?"""
    H = harmonic(A, metric, N)
    R = H.realization
    spaces = {bd: H.combined(bd) for bd in H.bc}
    bases = {bd: [R.element(bd, v) for v in S.sparse_basis()] for bd, S in spaces.items()}
    wit, unchecked = [], set()

    def lands(e: Element, bd: Bidegree) -> bool | None:
        if not e:
            return True
        if bd not in spaces:
            if R.dim(*bd) == 0:
                return not e
            unchecked.add(bd)
            return None
        return spaces[bd].contains(R.sparse(e, bd))

    def record(kind, ins, res, bd):
        wit.append(GeoWitness(kind, tuple(str(i) for i in ins), str(res), bd))

    for bd in sorted(bases):
        for u in bases[bd]:
            for kind, e, tb in (("del", u.d1(), (bd[0] + 1, bd[1])), ("dbar", u.d2(), (bd[0], bd[1] + 1))):
                if lands(e, tb) is False:
                    record(kind, (u,), e, tb)
                    if not all_witnesses:
                        return GeoVerdict(False, tuple(wit))
    keys = sorted(bases)
    for i, b1 in enumerate(keys):
        for b2 in keys[i:]:
            tb = (b1[0] + b2[0], b1[1] + b2[1])
            for u in bases[b1]:
                for v in bases[b2]:
                    e = u * v
                    if lands(e, tb) is False:
                        record("product", (u, v), e, tb)
                        if not all_witnesses:
                            return GeoVerdict(False, tuple(wit))
    return GeoVerdict(not wit, tuple(wit), tuple(sorted(unchecked)))


def product_span(H: HarmonicSpaces, which: str, bd1: Bidegree, bd2: Bidegree) -> Subspace:
    """Span of products of harmonic forms of two bidegrees."""
    R = H.realization
    tb = (bd1[0] + bd2[0], bd1[1] + bd2[1])
    vecs = [R.sparse(u * v, tb) for u in H.elements(which, bd1) for v in H.elements(which, bd2) if u * v]
    return Subspace(R.dim(*tb), vecs)


# ---------------------------------------------------------------------------
# formality certificates

@dataclass(frozen=True)
class Arrow:
    morphism: CbbaMorphism
    forward: bool = True  # forward: current -> next; backward: next -> current


@dataclass(frozen=True)
class FormalityCertificate:
    start: CBBA
    arrows: tuple[Arrow, ...]
    claim: str  # "weak" | "strong"

    @property
    def terminal(self) -> CBBA:
        cur = self.start
        for a in self.arrows:
            cur = a.morphism.target if a.forward else a.morphism.source
        return cur


@dataclass(frozen=True)
class FormalityVerdict:
    accepted: bool
    issues: tuple[str, ...]
    windows: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def __bool__(self):
        return self.accepted


def _differential_property(T: CBBA, claim: str, N: int | None) -> list[str]:
    R = T.realize(N if T.top_degree is None else None)
    D = R.complex
    bad = []
    for (p, q) in D.support:
        if not D.in_window(p, q):
            continue
        if claim == "weak":
            if not D.ddbar(p, q).is_zero():
                bad.append(f"ddbar != 0 on the terminal algebra at {(p, q)}")
        elif not (D.d1(p, q).is_zero() and D.d2(p, q).is_zero()):
            bad.append(f"del or dbar != 0 on the terminal algebra at {(p, q)}")
    return bad


def verify_formality_certificate(cert: FormalityCertificate, N: int | None = None,
                                 obstructions: Sequence[MasseyResult] = ()) -> FormalityVerdict:
    """Accept iff every arrow is a verified weak equivalence and the terminal
    algebra has the claimed differential property.

    Nonvanishing ABC-Massey products on the start algebra are obstructions:
    always for strong claims, and for weak claims when the start satisfies the
    ∂∂̄-lemma (where weak and strong formality agree).
    """
    if cert.claim not in ("weak", "strong"):
        raise InputError(f"unknown formality claim {cert.claim!r}")
    issues, windows, notes = [], [], []
    cur = cert.start
    for i, arrow in enumerate(cert.arrows):
        f = arrow.morphism
        src = f.source if arrow.forward else f.target
        if src is not cur:
            issues.append(f"arrow {i} does not start at the current algebra")
            break
        wv = is_weak_equivalence(f, N)
        if not wv.morphism:
            issues.append(f"arrow {i} is not a morphism: {wv.morphism.issues[0]}")
        elif not wv:
            w = wv.e1.witness
            issues.append(f"arrow {i} is not a weak equivalence: {w.theory} fails at {w.bidegree}")
        else:
            windows.append(f"arrow {i}: {wv.range_label}")
        cur = f.target if arrow.forward else f.source
    if not issues:
        issues.extend(_differential_property(cur, cert.claim, N))
    abc = [m for m in obstructions if m.kind in ("abc3", "abc4") and m.verdict == NONVANISHING]
    if abc:
        if cert.claim == "strong":
            issues.append(f"nonvanishing ABC-Massey product {_name(abc[0])} obstructs strong formality")
        else:
            bound = cert.start.default_bound(max(sum(m.bidegree) for m in abc) + 2)
            if ddbar_check(cert.start.realize(bound).complex):
                issues.append(f"nonvanishing ABC-Massey product {_name(abc[0])} obstructs weak formality "
                              "under the ddbar-lemma")
            else:
                notes.append("nonvanishing ABC-Massey products present; not treated as weak obstructions")
    return FormalityVerdict(not issues, tuple(issues), tuple(windows), tuple(notes))


def _name(m: MasseyResult) -> str:
    return "<" + ", ".join(m.inputs) + ">"


def _table_from_vectors(R: Realization, spaces: Mapping[Bidegree, Sequence[Element]], prefix: str,
                        reduce, name: str) -> tuple[TableCBBA, dict]:
    """A product-table algebra on given basis elements; products reduced by ``reduce``."""
    basis, elems = [], {}
    for bd in sorted(spaces):
        if bd == (0, 0):
            continue
        for i, e in enumerate(spaces[bd]):
            nm = f"{prefix}{bd[0]}{bd[1]}_{i}"
            basis.append(Generator(nm, *bd))
            elems[nm] = (bd, i, e)
    products = {}
    names = list(elems)
    for a in names:
        for b in names:
            bd = (elems[a][0][0] + elems[b][0][0], elems[a][0][1] + elems[b][0][1])
            coords = reduce(elems[a][2] * elems[b][2], bd)
            poly = tuple((c, ((f"{prefix}{bd[0]}{bd[1]}_{j}", 1),)) for j, c in coords.items() if c)
            if poly:
                products[(a, b)] = poly
    return TableCBBA(basis, products, name=name), {n: v[2] for n, v in elems.items()}


def bc_chain_certificate(A: CBBA, claim: str = "strong", N: int | None = None) -> FormalityCertificate:
    """The candidate chain A <- ker∂ ∩ ker∂̄ -> H_BC(A) with zero differentials.

    Both arrows are cbba morphisms for any A; they are weak equivalences only in
    favourable cases, which the verifier decides.
    """
    R = A.realize(N if A.top_degree is None else None)
    D = R.complex
    if D.dim(0, 0) != 1:
        raise InputError("the chain needs A^(0,0) spanned by the unit")
    closed, bc_reps, quots = {}, {}, {}
    for bd in D.support:
        K = intersect(kernel(D.d1(*bd)), kernel(D.d2(*bd)))
        closed[bd] = [R.element(bd, v) for v in K.sparse_basis()]
        G = cohomology(D, "BC", *bd)
        quots[bd] = (K, G.quotient)
        bc_reps[bd] = [R.element(bd, v) for v in G.quotient.sparse_basis()]

    def in_K(e: Element, bd):
        if bd not in closed:
            return {}
        K = quots[bd][0]
        return dict(enumerate(K.coordinates(R.sparse(e, bd)))) if e else {}

    def in_H(e: Element, bd):
        if bd not in quots or not e:
            return {}
        return dict(enumerate(quots[bd][1].coordinates(R.sparse(e, bd))))

    Kalg, Kel = _table_from_vectors(R, closed, "k", in_K, f"{A.name}-closed")
    Halg, Hel = _table_from_vectors(R, bc_reps, "h", in_H, f"{A.name}-bc")
    inc = CbbaMorphism(Kalg, A, dict(Kel))
    proj = {}
    for nm, e in Kel.items():
        bd = e.bidegree()
        coords = in_H(e, bd)
        acc = Halg.zero()
        for j, c in coords.items():
            if c:
                acc = acc + Halg.name_element(f"h{bd[0]}{bd[1]}_{j}").scale(c)
        proj[nm] = acc
    return FormalityCertificate(A, (Arrow(inc, forward=False), Arrow(CbbaMorphism(Kalg, Halg, proj))), claim)


# ---------------------------------------------------------------------------
# blow-ups

def blowup_bc_dims(dims_X: Mapping, dims_Z: Mapping, k: int) -> dict[Bidegree, int]:
    """dims(p,q) = dims_X(p,q) + Σ_{i=1}^{k-1} dims_Z(p-i, q-i)."""
    if not isinstance(k, int) or k < 2:
        raise CodimensionError(f"codimension must be an integer >= 2, got {k!r}")
    out: dict = {}
    for tab in (dims_X, dims_Z):
        for bd, n in tab.items():
            if not isinstance(n, int) or n < 0:
                raise InputError(f"dimension at {bd} must be a nonnegative integer")
    for bd, n in dims_X.items():
        out[tuple(bd)] = out.get(tuple(bd), 0) + n
    for (p, q), n in dims_Z.items():
        for i in range(1, k):
            key = (p + i, q + i)
            out[key] = out.get(key, 0) + n
    return {bd: n for bd, n in sorted(out.items()) if n}


def total(dims: Mapping) -> int:
    return sum(dims.values())

