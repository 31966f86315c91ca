"""The simplicial bicomplex on Δⁿ, its filtered S-complex, the spectral
sequence of the horizontal filtration, and spectral-sequence Massey products.

Conventions.  ``C_p`` is the sum over p-simplices σ of ``(A⁺)^{⊗(p+2)}``.  On
a summand for σ = (v_0 < ... < v_p),

    δ(a_0 ⊗ ... ⊗ a_{p+1}) = Σ_i (-1)^i a_0 ⊗ ... ⊗ a_i a_{i+1} ⊗ ... ⊗ a_{p+1}

lands in the summand of the face omitting v_i.  δ commutes with the internal
differential.  After applying the functor S, the filtered complex is stored
with the anticommuting total differential ``D = δ + (-1)^{p+1} d_S`` in total
degree ``t = n - p`` (``n`` the S-degree).  Page positions are reported as
``(p, n)``, so ``d_r`` has degree ``(-r, -r+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Mapping, Sequence

from .bicomplex import DoubleComplex, _schweitzer_map, schweitzer_components
from .cbba import CBBA, AugmentationIdeal, Element, TensorPower, _add_into, augmentation_ideal, tensor_power
from .errors import BBAError, InputError, NotDefinedOnPage, ResourceGuard, TruncationRequired
from .linalg import ONE, ZERO, Matrix, QuotientPresentation, Subspace, image, kernel, solve_affine, span_sum

DEFAULT_GUARD = 60000


# ---------------------------------------------------------------------------
# functors from double complexes to simple complexes

@dataclass(frozen=True)
class FunctorChoice:
    """``total``, ``column`` (∂̄ only) or ``schweitzer`` at a center (p, q)."""

    kind: str
    center: tuple[int, int] | None = None

    @classmethod
    def parse(cls, text: str) -> "FunctorChoice":
        t = text.strip()
        if t in ("total", "column"):
            return cls(t)
        if t.startswith("schweitzer:"):
            try:
                p, q = (int(s) for s in t.split(":", 1)[1].split(","))
            except ValueError:
                raise InputError(f"bad functor {text!r}; expected schweitzer:p,q") from None
            return cls("schweitzer", (p, q))
        raise InputError(f"unknown functor {text!r}; expected total, column or schweitzer:p,q")

    def __str__(self):
        return self.kind if self.center is None else f"schweitzer:{self.center[0]},{self.center[1]}"

    def tensor_degree(self, n: int) -> int:
        """Total tensor degree of the bidegrees making up S^n."""
        if self.kind != "schweitzer":
            return n
        p, q = self.center
        return p + q - 2 + n if n <= 0 else p + q + n - 1

    def index_of(self, bd: tuple[int, int]) -> int:
        """S-degree at which a bidegree appears."""
        if self.kind != "schweitzer":
            return bd[0] + bd[1]
        p, q = self.center
        if bd[0] >= p and bd[1] >= q:
            return bd[0] + bd[1] - p - q + 1
        if bd[0] < p and bd[1] < q:
            return bd[0] + bd[1] - p - q + 2
        raise InputError(f"bidegree {bd} does not occur in the Schweitzer complex at {self.center}")

    def selects(self, bd: tuple[int, int], n: int) -> bool:
        """Does bidegree ``bd`` belong to S^n?"""
        if self.kind != "schweitzer":
            return bd[0] + bd[1] == n
        p, q = self.center
        if n <= 0:
            return bd[0] + bd[1] == p + q - 2 + n and bd[0] < p and bd[1] < q
        return bd[0] + bd[1] == p + q + n - 1 and bd[0] >= p and bd[1] >= q

    def components(self, T: DoubleComplex, n: int) -> tuple:
        if self.kind == "schweitzer":
            return schweitzer_components(T, self.center[0], self.center[1], n)
        return tuple(bd for bd in sorted(T.dims) if bd[0] + bd[1] == n)

    def differential(self, T: DoubleComplex, n: int) -> Matrix:
        src, tgt = self.components(T, n), self.components(T, n + 1)
        if self.kind == "schweitzer":
            return _schweitzer_map(T, self.center[0], self.center[1], n, src, tgt)
        sd = [T.dim(*b) for b in src]
        td = [T.dim(*b) for b in tgt]
        if not src or not tgt:
            return Matrix.zero(sum(td), sum(sd))
        blocks = []
        for t in tgt:
            row = []
            for s in src:
                if self.kind == "total" and (s[0] + 1, s[1]) == t:
                    row.append(T.d1(*s))
                elif (s[0], s[1] + 1) == t:
                    row.append(T.d2(*s))
                else:
                    row.append(Matrix.zero(T.dim(*t), T.dim(*s)))
            blocks.append(row)
        return Matrix.block(blocks)


# ---------------------------------------------------------------------------
# simplicial bicomplex

def simplices(n: int, p: int) -> list[tuple[int, ...]]:
    """p-simplices of Δⁿ (p = -1 is the empty simplex)."""
    return [tuple(c) for c in combinations(range(n + 1), p + 1)]


@dataclass(eq=False)
class SimplicialBicomplex:
    """``C_p(A, Δⁿ)`` for ``-1 <= p <= n`` with the face-sign δ."""

    ideal: AugmentationIdeal
    n: int
    bound: int | None = None
    _tensors: dict = field(default_factory=dict, repr=False)

    @property
    def algebra(self) -> CBBA:
        return self.ideal.algebra

    def simplices(self, p: int) -> list[tuple[int, ...]]:
        return simplices(self.n, p)

    def tensor(self, k: int, degrees) -> TensorPower:
        key = (k, frozenset(degrees))
        T = self._tensors.get(key)
        if T is None:
            T = tensor_power(self.ideal, k, self.bound, degrees)
            self._tensors[key] = T
        return T

    @cached_property
    def _ideal_keys(self) -> frozenset:
        return frozenset(k for ks in self.ideal.keys.values() for k in ks)

    def delta_terms(self, sigma: tuple, t: tuple) -> dict:
        """δ of a basis tensor in summand σ, as {(face, tensor): coefficient}."""
        A = self.algebra
        acc: dict = {}
        for i in range(len(sigma)):
            face = sigma[:i] + sigma[i + 1:]
            for k2, c in A._mul_keys(t[i], t[i + 1]).items():
                if k2 not in self._ideal_keys:
                    continue
                nt = t[:i] + (k2,) + t[i + 2:]
                _add_into(acc, (face, nt), c if i % 2 == 0 else -c)
        return acc

    def delta(self, p: int, elems: Mapping[tuple, Mapping[tuple, object]]) -> dict:
        """δ on {σ: {tensor: coefficient}} in C_p."""
        out: dict = {}
        for sigma, terms in elems.items():
            for t, c in terms.items():
                for (face, nt), d in self.delta_terms(sigma, t).items():
                    _add_into(out.setdefault(face, {}), nt, c * d)
        return {f: {t: c for t, c in v.items() if c} for f, v in out.items() if any(v.values())}


def simplicial_bicomplex(A: CBBA | AugmentationIdeal, n: int, N: int | None = None) -> SimplicialBicomplex:
    if n < 0:
        raise InputError("simplex dimension must be nonnegative")
    ideal = A if isinstance(A, AugmentationIdeal) else augmentation_ideal(A, N if N is not None else _bound(A, None))
    return SimplicialBicomplex(ideal, n, ideal.bound)


def _bound(A: CBBA, N: int | None) -> int | None:
    if N is not None:
        return N
    if A.top_degree is None:
        raise TruncationRequired(f"algebra {A.name!r} is infinite-dimensional; give a degree bound")
    return None


# ---------------------------------------------------------------------------
# filtered complex

@dataclass(frozen=True)
class _Block:
    p: int
    n: int
    sigma: tuple
    bd: tuple
    offset: int
    dim: int


class FilteredComplex:
    """``S`` applied to every ``C_p``; spaces ``V_t = ⊕_p S^{t+p}(C_p)``."""

    def __init__(self, C: SimplicialBicomplex, functor: FunctorChoice, guard: int = DEFAULT_GUARD):
        self.C = C
        self.functor = functor
        self.guard = guard
        self._spaces: dict = {}
        self._dmat: dict = {}
        self._counts: dict = {}

    @property
    def p_range(self) -> range:
        return range(-1, self.C.n + 1)

    def _tensor_for(self, p: int, n: int) -> TensorPower:
        # the three S-degrees around n; the interval between them is needed
        # because ∂∂̄ passes through the intermediate total degree
        degs = [self.functor.tensor_degree(m) for m in (n - 1, n, n + 1)]
        return self.C.tensor(p + 2, range(min(degs), max(degs) + 1))

    def _tensor_dims(self, k: int) -> dict:
        """Bidegree dimensions of the k-fold tensor power, without building it."""
        c = self._counts.get(k)
        if c is None:
            base = {bd: len(ks) for bd, ks in self.C.ideal.keys.items() if ks}
            N = self.C.bound
            c = {(0, 0): 1}
            for _ in range(k):
                nxt: dict = {}
                for (p, q), m in c.items():
                    for (a, b), d in base.items():
                        if N is None or p + q + a + b <= N:
                            nxt[(p + a, q + b)] = nxt.get((p + a, q + b), 0) + m * d
                c = nxt
            self._counts[k] = c
        return c

    def estimate(self, t: int) -> int:
        """Dimension of V_t, computed from bidegree counts alone."""
        total = 0
        for p in self.p_range:
            n = t + p
            m = sum(d for bd, d in self._tensor_dims(p + 2).items() if self.functor.selects(bd, n))
            total += m * len(self.C.simplices(p))
        return total

    def blocks(self, t: int) -> list[_Block]:
        if t in self._spaces:
            return self._spaces[t]
        est = self.estimate(t)
        if est > self.guard:
            raise ResourceGuard(f"filtered complex in total degree {t} has dimension {est} > guard {self.guard}")
        out, off = [], 0
        for p in self.p_range:
            n = t + p
            T = self._tensor_for(p, n)
            comps = self.functor.components(T.complex, n)
            for sigma in self.C.simplices(p):
                for bd in comps:
                    d = T.complex.dim(*bd)
                    if d:
                        out.append(_Block(p, n, sigma, bd, off, d))
                        off += d
        if off > self.guard:
            raise ResourceGuard(f"filtered complex in total degree {t} has dimension {off} > guard {self.guard}")
        self._spaces[t] = out
        return out

    def dim(self, t: int) -> int:
        bl = self.blocks(t)
        return bl[-1].offset + bl[-1].dim if bl else 0

    def filtration_indices(self, t: int, p: int) -> list[int]:
        return [b.offset + i for b in self.blocks(t) if b.p <= p for i in range(b.dim)]

    def block_indices(self, t: int, pred) -> list[int]:
        return [b.offset + i for b in self.blocks(t) if pred(b.p) for i in range(b.dim)]

    def keys(self, b: _Block) -> list[tuple]:
        return self._tensor_for(b.p, b.n).keys[b.bd]

    def D(self, t: int) -> Matrix:
        """Total differential V_t -> V_{t+1}."""
        if t in self._dmat:
            return self._dmat[t]
        src, tgt = self.blocks(t), self.blocks(t + 1)
        tindex = {(b.p, b.sigma, b.bd): b for b in tgt}
        rows = [{} for _ in range(self.dim(t + 1))]
        by_p: dict = {}
        for b in src:
            by_p.setdefault(b.p, []).append(b)
        for p, bl in by_p.items():
            n = t + p
            T = self._tensor_for(p, n)
            Tn1 = self._tensor_for(p, n + 1)
            sign = ONE if (p + 1) % 2 == 0 else -ONE
            # vertical part: (-1)^{p+1} d_S within each simplex
            comps_all = self.functor.components(T.complex, n)
            comps_tgt = self.functor.components(Tn1.complex, n + 1)
            dS = self.functor.differential(T.complex, n)
            soff, o = {}, 0
            for bd in comps_all:
                soff[bd] = o
                o += T.complex.dim(*bd)
            toff, o = {}, 0
            for bd in comps_tgt:
                toff[bd] = o
                o += Tn1.complex.dim(*bd)
            for b in bl:
                base = soff[b.bd]
                for tb_bd in comps_tgt:
                    tb = tindex.get((p, b.sigma, tb_bd))
                    if tb is None:
                        continue
                    tb_off = toff[tb_bd]
                    for i in range(tb.dim):
                        r = dS.rows[tb_off + i]
                        for j, c in r.items():
                            if base <= j < base + b.dim:
                                rows[tb.offset + i][b.offset + j - base] = sign * c
            # horizontal part δ, preserving bidegree
            if p >= 0:
                Tlow = self._tensor_for(p - 1, n)
                for b in bl:
                    for j, t_key in enumerate(T.keys[b.bd]):
                        for (face, nt), c in self.C.delta_terms(b.sigma, t_key).items():
                            tb = tindex.get((p - 1, face, b.bd))
                            if tb is None:
                                continue
                            hit = Tlow.index.get(nt)
                            if hit is None:
                                continue
                            row = rows[tb.offset + hit[1]]
                            row[b.offset + j] = row.get(b.offset + j, ZERO) + c
        rows = [{j: c for j, c in r.items() if c} for r in rows]
        M = Matrix._trusted(len(rows), self.dim(t), rows)
        self._dmat[t] = M
        return M

    # -- vectors ----------------------------------------------------------------

    def vector(self, t: int, p: int, pieces: Mapping[tuple, Mapping[tuple, object]]) -> dict:
        """Coordinates of {σ: {tensor: c}} placed in filtration degree p."""
        out = {}
        for b in self.blocks(t):
            if b.p != p or b.sigma not in pieces:
                continue
            T = self._tensor_for(b.p, b.n)
            for tk, c in pieces[b.sigma].items():
                hit = T.index.get(tk)
                if hit is not None and hit[0] == b.bd and c:
                    out[b.offset + hit[1]] = c
        return out

    def pieces(self, t: int, v: Mapping[int, object]) -> dict:
        """Inverse of ``vector``: {(p, σ): {tensor: c}}."""
        out: dict = {}
        for b in self.blocks(t):
            ks = None
            for i in range(b.dim):
                c = v.get(b.offset + i)
                if c:
                    ks = ks or self.keys(b)
                    out.setdefault((b.p, b.sigma), {})[ks[i]] = c
        return out


def apply_functor(C: SimplicialBicomplex, S: FunctorChoice | str, guard: int = DEFAULT_GUARD) -> FilteredComplex:
    if isinstance(S, str):
        S = FunctorChoice.parse(S)
    return FilteredComplex(C, S, guard)


def _select(M: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    cidx = {c: j for j, c in enumerate(cols)}
    out = []
    for i in rows:
        out.append({cidx[j]: c for j, c in M.rows[i].items() if j in cidx})
    return Matrix._trusted(len(rows), len(cols), out)


def _embed(U: Subspace, cols: Sequence[int], n: int) -> Subspace:
    return Subspace(n, [{cols[j]: c for j, c in v.items()} for v in U.sparse_basis()])


# ---------------------------------------------------------------------------
# spectral sequence

class SpectralSequence:
    """Pages of the horizontal filtration, computed on demand per total degree."""

    def __init__(self, F: FilteredComplex, r_max: int | None = None):
        self.F = F
        self.r_max = r_max
        self._z: dict = {}

    def Z(self, r: int, p: int, t: int) -> Subspace:
        """{x in F_p : Dx in F_{p-r}} in total degree t."""
        key = (r, p, t)
        if key in self._z:
            return self._z[key]
        F = self.F
        n = F.dim(t)
        cols = F.filtration_indices(t, p)
        if r <= 0 or not cols:
            Z = _embed(Subspace.full(len(cols)), cols, n)
        else:
            rows = F.block_indices(t + 1, lambda q: q > p - r)
            Z = _embed(kernel(_select(F.D(t), rows, cols)), cols, n)
        self._z[key] = Z
        return Z

    def boundaries(self, r: int, p: int, t: int) -> Subspace:
        """Z_{r-1}^{p-1} + D Z_{r-1}^{p+r-1} inside V_t."""
        low = self.Z(r - 1, p - 1, t)
        prev = self.Z(r - 1, p + r - 1, t - 1)
        return span_sum(low, image(self.F.D(t - 1), prev))

    def page(self, r: int, p: int, n: int) -> QuotientPresentation:
        """E_r at position (p, n)."""
        if r < 1:
            raise BBAError("pages start at r = 1")
        t = n - p
        return QuotientPresentation(self.Z(r, p, t), self.boundaries(r, p, t))

    def dim(self, r: int, p: int, n: int) -> int:
        return self.page(r, p, n).dim

    def differential(self, r: int, p: int, n: int) -> Matrix:
        """Matrix of d_r: E_r^{p,n} -> E_r^{p-r, n-r+1} in canonical bases."""
        src = self.page(r, p, n)
        tgt = self.page(r, p - r, n - r + 1)
        D = self.F.D(n - p)
        cols = []
        for v in src.sparse_basis():
            cols.append(tgt.coordinates_sparse(D.apply_sparse(v)))
        return Matrix.from_columns(cols, tgt.dim)

    def dims(self, r: int, n_range: Sequence[int]) -> dict[tuple[int, int], int]:
        out = {}
        for p in self.F.p_range:
            for n in n_range:
                d = self.dim(r, p, n)
                if d:
                    out[(p, n)] = d
        return out

    def check_page(self, r: int, p: int, n: int) -> list[str]:
        """d_r² = 0 and E_{r+1} = homology of d_r at (p, n)."""
        issues = []
        into = self.differential(r, p + r, n + r - 1)
        out = self.differential(r, p, n)
        if not (out @ into).is_zero():
            issues.append(f"d_{r}^2 != 0 at {(p, n)}")
        hom = self.dim(r, p, n) - out.rank() - into.rank()
        if hom != self.dim(r + 1, p, n):
            issues.append(f"dim E_{r + 1}{(p, n)} = {self.dim(r + 1, p, n)} but homology is {hom}")
        return issues

    def total_homology_dim(self, t: int) -> int:
        F = self.F
        return F.dim(t) - F.D(t).rank() - F.D(t - 1).rank()


def pages(F: FilteredComplex, r_max: int) -> SpectralSequence:
    if r_max < 1:
        raise InputError("r_max must be at least 1")
    return SpectralSequence(F, r_max)


# ---------------------------------------------------------------------------
# spectral-sequence Massey products

@dataclass(frozen=True, eq=False)
class SSMasseyResult:
    n_fold: int
    functor: FunctorChoice
    degree: int  # S-degree of the output
    representative: Element
    indeterminacy: Subspace
    correction: Mapping  # {(p, σ): {tensor: c}} lower-filtration part of the zigzag
    keys: tuple  # basis keys of the output space
    _sub: Subspace = field(repr=False, default=None)

    def _vec(self, e: Element) -> dict:
        idx = {k: i for i, k in enumerate(self.keys)}
        out = {}
        for k, c in e.terms.items():
            if k not in idx:
                raise BBAError(f"{e} does not lie in the output space")
            out[idx[k]] = c
        return out

    def contains(self, e: Element) -> bool:
        """Is ``e`` in the output coset?"""
        d = self._vec(e - self.representative)
        return self.indeterminacy.contains(d)

    @property
    def vanishes(self) -> bool:
        return self.indeterminacy.contains(self._vec(self.representative))

    @property
    def indeterminacy_dim(self) -> int:
        return self.indeterminacy.dim


def ss_massey(A: CBBA, inputs: Sequence[Element], functor: FunctorChoice | str, N: int | None = None,
              guard: int = DEFAULT_GUARD) -> SSMasseyResult:
    """d_{n-1} of the pure tensor of the inputs in EM(A, Δ^{n-2}, S)."""
    S = FunctorChoice.parse(functor) if isinstance(functor, str) else functor
    k = len(inputs)
    if k < 2:
        raise InputError("an n-fold product needs n >= 2")
    total = 0
    bds = []
    for a in inputs:
        bd = a.bidegree()
        if bd is None or bd == (0, 0):
            raise InputError(f"input {a} must be a nonzero element of pure positive bidegree")
        bds.append(bd)
        total += bd[0] + bd[1]
    if N is None and A.top_degree is None:
        N = total + 2
    C = simplicial_bicomplex(A, k - 2, N)
    F = FilteredComplex(C, S, guard)
    if not all(C.ideal.contains(a) for a in inputs):
        raise InputError("inputs must lie in the augmentation ideal")
    bd = (sum(b[0] for b in bds), sum(b[1] for b in bds))
    n_in = S.index_of(bd)
    r = k - 1
    p0 = k - 2
    t = n_in - p0
    # the pure tensor, in the top simplex
    terms: dict = {(): ONE}
    for a in inputs:
        new: dict = {}
        for tk, c in terms.items():
            for key, d in a.terms.items():
                _add_into(new, tk + (key,), c * d)
        terms = new
    top = tuple(range(k - 1))
    x = F.vector(t, p0, {top: terms})
    if len(x) != len([c for c in terms.values() if c]):
        raise BBAError("input tensor lies beyond the truncation bound")
    D = F.D(t)
    Dx = D.apply_sparse(x)
    cols = F.filtration_indices(t, p0 - 1)
    Dc = _select(D, range(D.nrows), cols)
    found = None
    for rr in range(1, r + 1):
        rows = F.block_indices(t + 1, lambda q, rr=rr: q > p0 - rr)
        M = _select(Dc, rows, range(len(cols)))
        b = {i: -Dx[row] for i, row in enumerate(rows) if row in Dx}
        sol = solve_affine(M, b)
        if not sol.feasible:
            if rr == 1:
                raise InputError("the input tensor is not a cocycle of S")
            raise NotDefinedOnPage(f"the input does not survive to page {rr}", page=rr)
        found = sol
    c_vec = {cols[j]: v for j, v in enumerate(found.particular) if v}
    xc = dict(x)
    xc.update(c_vec)
    out = D.apply_sparse(xc)
    # output lives in the p = -1 block of V_{t+1}
    tblocks = [bl for bl in F.blocks(t + 1) if bl.p == -1]
    out_keys, offs = [], []
    for bl in tblocks:
        for key in F.keys(bl):
            out_keys.append(key[0])
            offs.append(bl.offset)
    pos = {bl.offset + i: j for j, (bl, i) in enumerate((bl, i) for bl in tblocks for i in range(bl.dim))}
    rep = A.zero()
    for i, c in out.items():
        if i not in pos:
            raise BBAError("zigzag output is not concentrated in filtration -1")
        rep = rep + A.basis_element(out_keys[pos[i]]).scale(c)
    # indeterminacy: D Z_{r-1}^{r-2}, projected to the p = -1 block
    Z = SpectralSequence(F).Z(r - 1, r - 2, t)
    ind_vecs = []
    for v in Z.sparse_basis():
        w = D.apply_sparse(v)
        ind_vecs.append({pos[i]: c for i, c in w.items() if i in pos})
    ind = Subspace(len(out_keys), ind_vecs)
    return SSMasseyResult(k, S, n_in - r + 1, rep, ind, F.pieces(t, c_vec), tuple(out_keys))

