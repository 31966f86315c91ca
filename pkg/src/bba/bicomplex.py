"""Bounded double complexes and their cohomological functors.

Bidegrees are integer pairs ``(p, q)``.  ``del_[(p, q)]`` is the matrix of
``∂: A^{p,q} -> A^{p+1,q}`` and ``dbar[(p, q)]`` that of ``∂̄: A^{p,q} -> A^{p,q+1}``;
missing entries are zero maps.  An optional real structure is stored as
matrices ``S`` with ``σ(v) = S · conj(v)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import BBAError, StructureError
from .linalg import (
    ONE,
    ZERO,
    Matrix,
    QuotientPresentation,
    Subspace,
    image,
    kernel,
    span_sum,
)

Bidegree = tuple[int, int]

THEORIES = ("column", "row", "deRham", "BC", "A")
_THEORY_ALIASES = {
    "column": "column", "dolbeault": "column", "dbar": "column",
    "row": "row", "del": "row",
    "derham": "deRham", "de rham": "deRham", "total": "deRham",
    "bc": "BC", "bott-chern": "BC",
    "a": "A", "aeppli": "A",
}


def normalize_theory(name: str) -> str:
    key = name.strip().lower()
    if key.startswith("schweitzer"):
        return "schweitzer"
    try:
        return _THEORY_ALIASES[key]
    except KeyError:
        raise BBAError(f"unknown theory {name!r}") from None


@dataclass(frozen=True, eq=False)
class DoubleComplex:
    """A bounded double complex over Q(i).

    ``window`` is the largest total degree in which cohomology is trusted; it is
    ``None`` for complexes that are not truncations of something larger.
    """

    dims: Mapping[Bidegree, int]
    del_: Mapping[Bidegree, Matrix] = field(default_factory=dict)
    dbar: Mapping[Bidegree, Matrix] = field(default_factory=dict)
    labels: Mapping[Bidegree, Sequence[str]] | None = None
    conj: Mapping[Bidegree, Matrix] | None = None
    window: int | None = None

    def __post_init__(self):
        dims = {tuple(k): int(v) for k, v in self.dims.items() if v}
        object.__setattr__(self, "dims", dims)
        for name, maps, step in (("del", self.del_, (1, 0)), ("dbar", self.dbar, (0, 1))):
            for (p, q), M in maps.items():
                want = (self.dim(p + step[0], q + step[1]), self.dim(p, q))
                if M.shape != want:
                    raise StructureError(
                        f"{name} at {(p, q)} has shape {M.shape}, expected {want}", (p, q))
        if self.labels is not None:
            for bd, labs in self.labels.items():
                if len(labs) != self.dim(*bd):
                    raise StructureError(f"label count mismatch at {bd}", bd)

    # -- basic access -------------------------------------------------------

    @property
    def support(self) -> list[Bidegree]:
        return sorted(self.dims)

    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def label(self, p: int, q: int) -> list[str]:
        if self.labels is not None and (p, q) in self.labels:
            return list(self.labels[(p, q)])
        return [f"e{p}{q}_{i}" for i in range(self.dim(p, q))]

    def d1(self, p: int, q: int) -> Matrix:
        """∂ at (p, q)."""
        M = self.del_.get((p, q))
        return M if M is not None else Matrix.zero(self.dim(p + 1, q), self.dim(p, q))

    def d2(self, p: int, q: int) -> Matrix:
        """∂̄ at (p, q)."""
        M = self.dbar.get((p, q))
        return M if M is not None else Matrix.zero(self.dim(p, q + 1), self.dim(p, q))

    def ddbar(self, p: int, q: int) -> Matrix:
        """∂∂̄ : A^{p,q} -> A^{p+1,q+1}."""
        return self.d1(p, q + 1) @ self.d2(p, q)

    def in_window(self, p: int, q: int) -> bool:
        return self.window is None or p + q <= self.window

    def total_degrees(self) -> list[int]:
        return sorted({p + q for p, q in self.dims})

    def with_window(self, window: int | None) -> "DoubleComplex":
        return DoubleComplex(self.dims, self.del_, self.dbar, self.labels, self.conj, window)

    # -- constructors -------------------------------------------------------

    @classmethod
    def dot(cls, p: int, q: int) -> "DoubleComplex":
        return cls({(p, q): 1})

    @classmethod
    def square(cls, p: int, q: int) -> "DoubleComplex":
        """w at (p,q) with ∂w, ∂̄w and ∂∂̄w = -∂̄∂w."""
        e = Matrix.identity(1)
        return cls(
            {(p, q): 1, (p + 1, q): 1, (p, q + 1): 1, (p + 1, q + 1): 1},
            del_={(p, q): e, (p, q + 1): e},
            dbar={(p, q): e, (p + 1, q): -e},
        )

    @classmethod
    def zigzag(cls, bidegrees: Sequence[Bidegree], signs: Sequence | None = None) -> "DoubleComplex":
        """A zigzag through consecutive bidegrees, one basis vector at each."""
        bds = [tuple(b) for b in bidegrees]
        if len(set(bds)) != len(bds):
            raise StructureError("zigzag bidegrees must be distinct")
        degs = [p + q for p, q in bds]
        if any(abs(x - y) != 1 for x, y in zip(degs, degs[1:])) or len(set(degs)) > 2:
            raise StructureError("zigzag bidegrees must alternate between two total degrees")
        dims = {b: 1 for b in bds}
        del_, dbar = {}, {}
        for k, (a, b) in enumerate(zip(bds, bds[1:])):
            c = ONE if signs is None else signs[k]
            diff = (b[0] - a[0], b[1] - a[1])
            if diff == (1, 0):
                del_[a] = Matrix(1, 1, [{0: c}])
            elif diff == (0, 1):
                dbar[a] = Matrix(1, 1, [{0: c}])
            elif diff == (-1, 0):
                del_[b] = Matrix(1, 1, [{0: c}])
            elif diff == (0, -1):
                dbar[b] = Matrix(1, 1, [{0: c}])
            else:
                raise StructureError(f"{a} and {b} are not adjacent")
        return cls(dims, del_, dbar)

    def direct_sum(self, other: "DoubleComplex") -> "DoubleComplex":
        bds = set(self.dims) | set(other.dims)
        dims = {b: self.dim(*b) + other.dim(*b) for b in bds}

        def blockdiag(A: Matrix, B: Matrix) -> Matrix:
            return Matrix.block([[A, Matrix.zero(A.nrows, B.ncols)],
                                 [Matrix.zero(B.nrows, A.ncols), B]])

        del_ = {b: blockdiag(self.d1(*b), other.d1(*b)) for b in bds}
        dbar = {b: blockdiag(self.d2(*b), other.d2(*b)) for b in bds}
        window = None
        if self.window is not None or other.window is not None:
            window = min(w for w in (self.window, other.window) if w is not None)
        return DoubleComplex(dims, del_, dbar, window=window)

    def change_basis(self, P: Mapping[Bidegree, Matrix], Pinv: Mapping[Bidegree, Matrix]) -> "DoubleComplex":
        """Conjugate every differential by invertible per-bidegree matrices."""
        def get(m, b):
            return m.get(b, Matrix.identity(self.dim(*b)))
        del_ = {(p, q): get(P, (p + 1, q)) @ self.d1(p, q) @ get(Pinv, (p, q)) for p, q in self.dims}
        dbar = {(p, q): get(P, (p, q + 1)) @ self.d2(p, q) @ get(Pinv, (p, q)) for p, q in self.dims}
        return DoubleComplex(self.dims, del_, dbar, window=self.window)


@dataclass(frozen=True)
class Issue:
    identity: str
    bidegree: Bidegree
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.ok


def validate(D: DoubleComplex) -> ValidationReport:
    """Check ∂² = 0, ∂̄² = 0, ∂∂̄ + ∂̄∂ = 0 and the real-structure identities."""
    issues: list[Issue] = []
    for p, q in D.support:
        if not (D.d1(p + 1, q) @ D.d1(p, q)).is_zero():
            issues.append(Issue("del^2 = 0", (p, q), "∂∘∂ is nonzero"))
        if not (D.d2(p, q + 1) @ D.d2(p, q)).is_zero():
            issues.append(Issue("dbar^2 = 0", (p, q), "∂̄∘∂̄ is nonzero"))
        ac = D.d1(p, q + 1) @ D.d2(p, q) + D.d2(p + 1, q) @ D.d1(p, q)
        if not ac.is_zero():
            issues.append(Issue("del dbar + dbar del = 0", (p, q), "anticommutator is nonzero"))
    if D.conj is not None:
        for p, q in D.support:
            S = D.conj.get((p, q))
            if S is None or S.shape != (D.dim(q, p), D.dim(p, q)):
                issues.append(Issue("conj shape", (p, q), "missing or misshapen conjugation"))
                continue
            Sb = D.conj.get((q, p))
            if Sb is None:
                issues.append(Issue("conj shape", (q, p), "missing conjugation"))
                continue
            if Sb @ S.conj() != Matrix.identity(D.dim(p, q)):
                issues.append(Issue("conj^2 = id", (p, q), "σ∘σ is not the identity"))
            if (q + 1, p) in D.dims or D.dim(p, q + 1):
                S1 = D.conj.get((q + 1, p), Matrix.zero(D.dim(p, q + 1), D.dim(q + 1, p)))
                lhs = S1 @ D.d1(q, p).conj() @ S.conj()
                if lhs != D.d2(p, q):
                    issues.append(Issue("conj del conj = dbar", (p, q), "σ∂σ differs from ∂̄"))
    return ValidationReport(tuple(issues))


# ---------------------------------------------------------------------------
# cohomology

@dataclass(frozen=True)
class CohomologyClass:
    theory: str
    bidegree: tuple
    representative: tuple
    group: "CohomologyGroup"

    @property
    def is_zero(self) -> bool:
        return self.group.quotient.modulus.contains(self.representative)


@dataclass(frozen=True, eq=False)
class CohomologyGroup:
    """A cohomology space presented as ``numerator / modulus``.

    ``components`` lists the bidegrees whose direct sum is the ambient space,
    in order; single-bidegree theories have one component.
    """

    theory: str
    bidegree: tuple
    quotient: QuotientPresentation
    components: tuple[Bidegree, ...]
    component_dims: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.quotient.dim

    def __eq__(self, other):
        if not isinstance(other, CohomologyGroup):
            return NotImplemented
        return self.quotient == other.quotient and self.component_dims == other.component_dims

    def __hash__(self):
        return hash(self.quotient)

    def classes(self) -> list[CohomologyClass]:
        return [CohomologyClass(self.theory, self.bidegree, b, self) for b in self.quotient.basis()]

    def split(self, v: Sequence) -> dict[Bidegree, tuple]:
        """Cut a vector of the ambient space into its bidegree components."""
        out, off = {}, 0
        for bd, n in zip(self.components, self.component_dims):
            out[bd] = tuple(v[off:off + n])
            off += n
        return out


def _group(theory, bidegree, num: Subspace, den: Subspace, comps, cdims) -> CohomologyGroup:
    return CohomologyGroup(theory, bidegree, QuotientPresentation(num, den), tuple(comps), tuple(cdims))


def _kernel_of_stack(mats: Sequence[Matrix], n: int) -> Subspace:
    mats = [m for m in mats if m.nrows]
    if not mats:
        return Subspace.full(n)
    return kernel(Matrix.vstack(mats))


def cohomology(D: DoubleComplex, theory: str, p: int, q: int = 0,
               center: Bidegree | None = None, index: int | None = None) -> CohomologyGroup:
    """Cohomology of ``D`` in the requested theory.

    For ``deRham`` the argument ``p`` is the total degree.  For
    ``schweitzer`` pass ``center=(p, q)`` and ``index=i`` (``p, q`` then
    default to the center).
    """
    th = normalize_theory(theory)
    if th == "deRham":
        return total_complex(D).cohomology(p)
    if th == "schweitzer":
        if center is None:
            center = (p, q)
        if index is None:
            raise BBAError("schweitzer cohomology needs an index")
        return schweitzer(D, center[0], center[1], index - 1, index + 1).cohomology(index)
    n = D.dim(p, q)
    comps, cdims = ((p, q),), (n,)
    d1, d2 = D.d1(p, q), D.d2(p, q)
    if th == "column":
        num = kernel(d2)
        den = image(D.d2(p, q - 1))
    elif th == "row":
        num = kernel(d1)
        den = image(D.d1(p - 1, q))
    elif th == "BC":
        num = _kernel_of_stack([d1, d2], n)
        den = image(D.ddbar(p - 1, q - 1))
    else:  # Aeppli
        num = kernel(D.ddbar(p, q))
        den = span_sum(image(D.d1(p - 1, q)), image(D.d2(p, q - 1)))
    return _group(th, (p, q), num, den, comps, cdims)


def cohomology_dims(D: DoubleComplex, theory: str) -> dict:
    """Dimension table of one theory; keys are bidegrees (total degrees for de Rham)."""
    th = normalize_theory(theory)
    if th == "deRham":
        T = total_complex(D)
        return {k: T.cohomology(k).dim for k in sorted(T.dims)}
    return {(p, q): cohomology(D, th, p, q).dim for p, q in D.support}


# ---------------------------------------------------------------------------
# the Schweitzer complex

@dataclass(frozen=True, eq=False)
class SchweitzerComplexView:
    center: Bidegree
    i_min: int
    i_max: int
    components: Mapping[int, tuple[Bidegree, ...]]
    dims: Mapping[int, tuple[int, ...]]
    boundary: Mapping[int, Matrix]  # i -> S^i -> S^{i+1}

    def space_dim(self, i: int) -> int:
        return sum(self.dims.get(i, ()))

    def offsets(self, i: int) -> dict[Bidegree, int]:
        out, off = {}, 0
        for bd, n in zip(self.components[i], self.dims[i]):
            out[bd] = off
            off += n
        return out

    def cohomology(self, i: int) -> CohomologyGroup:
        if i - 1 not in self.boundary or i not in self.boundary:
            raise BBAError(f"index {i} is outside the computed range of the view")
        num = kernel(self.boundary[i])
        den = image(self.boundary[i - 1])
        return _group("schweitzer", (self.center, i), num, den, self.components[i], self.dims[i])


def schweitzer_components(D: DoubleComplex, p: int, q: int, i: int) -> tuple[Bidegree, ...]:
    if i <= 0:
        total = p + q - 2 + i
        return tuple(bd for bd in sorted(D.dims)
                     if bd[0] + bd[1] == total and bd[0] < p and bd[1] < q)
    total = p + q + i - 1
    return tuple(bd for bd in sorted(D.dims) if bd[0] + bd[1] == total and bd[0] >= p and bd[1] >= q)


def _schweitzer_map(D: DoubleComplex, p: int, q: int, i: int, src, tgt) -> Matrix:
    sdims = [D.dim(*b) for b in src]
    tdims = [D.dim(*b) for b in tgt]
    if i == 0:
        if not src or not tgt:
            return Matrix.zero(sum(tdims), sum(sdims))
        return D.ddbar(*src[0])
    blocks = []
    for t in tgt:
        row = []
        for s in src:
            if (s[0] + 1, s[1]) == t:
                row.append(D.d1(*s))
            elif (s[0], s[1] + 1) == t:
                row.append(D.d2(*s))
            else:
                row.append(Matrix.zero(D.dim(*t), D.dim(*s)))
        blocks.append(row)
    if not tgt:
        return Matrix.zero(0, sum(sdims))
    if not src:
        return Matrix.zero(sum(tdims), 0)
    return Matrix.block(blocks)


def schweitzer(D: DoubleComplex, p: int, q: int, i_min: int, i_max: int) -> SchweitzerComplexView:
    """The Schweitzer complex ``S_{p,q}(D)`` on indices ``i_min-1 .. i_max+1``.

    Index 0 is ``A^{p-1,q-1}`` and index 1 is ``A^{p,q}``; the map between them
    is ``∂∂̄``, the others are (projected) total differentials.  Boundaries are
    stored for ``i_min-1 <= i <= i_max`` so that cohomology is available on the
    whole requested range.
    """
    if i_min > i_max:
        raise BBAError(f"empty index range [{i_min}, {i_max}]")
    comps, dims, bnd = {}, {}, {}
    for i in range(i_min - 1, i_max + 2):
        comps[i] = schweitzer_components(D, p, q, i)
        dims[i] = tuple(D.dim(*b) for b in comps[i])
    for i in range(i_min - 1, i_max + 1):
        bnd[i] = _schweitzer_map(D, p, q, i, comps[i], comps[i + 1])
    return SchweitzerComplexView((p, q), i_min, i_max, comps, dims, bnd)


# ---------------------------------------------------------------------------
# total complex

@dataclass(frozen=True, eq=False)
class TotalComplex:
    dims: Mapping[int, int]
    d: Mapping[int, Matrix]
    components: Mapping[int, tuple[Bidegree, ...]]
    component_dims: Mapping[int, tuple[int, ...]]

    def differential(self, k: int) -> Matrix:
        M = self.d.get(k)
        return M if M is not None else Matrix.zero(self.dims.get(k + 1, 0), self.dims.get(k, 0))

    def offsets(self, k: int) -> dict[Bidegree, int]:
        out, off = {}, 0
        for bd, n in zip(self.components.get(k, ()), self.component_dims.get(k, ())):
            out[bd] = off
            off += n
        return out

    def cohomology(self, k: int) -> CohomologyGroup:
        num = kernel(self.differential(k))
        den = image(self.differential(k - 1))
        return _group("deRham", (k,), num, den, self.components.get(k, ()), self.component_dims.get(k, ()))


def total_complex(D: DoubleComplex) -> TotalComplex:
    comps: dict[int, list] = {}
    for bd in sorted(D.dims):
        comps.setdefault(bd[0] + bd[1], []).append(bd)
    degrees = sorted(comps)
    dims = {k: sum(D.dim(*b) for b in comps[k]) for k in degrees}
    d = {}
    for k in degrees:
        src = comps[k]
        tgt = comps.get(k + 1, [])
        if not tgt:
            d[k] = Matrix.zero(0, dims[k])
            continue
        blocks = []
        for t in tgt:
            row = []
            for s in src:
                if (s[0] + 1, s[1]) == t:
                    row.append(D.d1(*s))
                elif (s[0], s[1] + 1) == t:
                    row.append(D.d2(*s))
                else:
                    row.append(Matrix.zero(D.dim(*t), D.dim(*s)))
            blocks.append(row)
        d[k] = Matrix.block(blocks)
    return TotalComplex(dims, d,
                        {k: tuple(v) for k, v in comps.items()},
                        {k: tuple(D.dim(*b) for b in v) for k, v in comps.items()})


# ---------------------------------------------------------------------------
# zigzag decomposition

@dataclass(frozen=True, order=True)
class Shape:
    """An indecomposable summand.

    ``kind`` is ``"square"`` (``bidegrees[0]`` is the corner w) or
    ``"zigzag"``.  For zigzags, ``arrows[k]`` names the differential joining
    ``bidegrees[k]`` and ``bidegrees[k+1]``, either way round.
    """

    kind: str
    bidegrees: tuple[Bidegree, ...]
    arrows: tuple[str, ...] = ()

    @property
    def is_dot(self) -> bool:
        return self.kind == "zigzag" and len(self.bidegrees) == 1

    @property
    def length(self) -> int:
        return len(self.bidegrees)

    @property
    def total_degrees(self) -> tuple[int, ...]:
        return tuple(sorted({p + q for p, q in self.bidegrees}))

    def contribution(self, theory: str) -> dict:
        """Dimension contributed to one cohomology theory (or to ``"space"``)."""
        if theory == "space":
            out: dict = {}
            for b in self.bidegrees:
                out[b] = out.get(b, 0) + 1
            return out
        if self.kind == "square":
            return {}
        th = normalize_theory(theory)
        bds = self.bidegrees
        k = min(p + q for p, q in bds)
        lows = [b for b in bds if b[0] + b[1] == k]
        highs = [b for b in bds if b[0] + b[1] == k + 1]
        if len(bds) == 1:
            lows, highs = list(bds), []
        if th == "BC":
            cells = highs + (lows if len(bds) == 1 else [])
            return _count(cells)
        if th == "A":
            return _count(lows)
        touched = {"del": set(), "dbar": set()}
        for j, arrow in enumerate(self.arrows):
            touched[arrow].add(bds[j])
            touched[arrow].add(bds[j + 1])
        if th == "row":
            return _count([b for b in bds if b not in touched["del"]])
        if th == "column":
            return _count([b for b in bds if b not in touched["dbar"]])
        # de Rham, keyed by total degree
        if len(lows) > len(highs):
            return {k: 1}
        if len(highs) > len(lows):
            return {k + 1: 1}
        return {}

    def describe(self) -> str:
        if self.kind == "square":
            return f"square at {self.bidegrees[0]}"
        if self.is_dot:
            return f"dot at {self.bidegrees[0]}"
        parts = [str(self.bidegrees[0])]
        for a, b in zip(self.arrows, self.bidegrees[1:]):
            parts.append(f" -{a}- {b}")
        return "zigzag " + "".join(parts)


def _count(cells) -> dict:
    out: dict = {}
    for b in cells:
        out[b] = out.get(b, 0) + 1
    return out


@dataclass(frozen=True)
class ZigzagDecomposition:
    shapes: Mapping[Shape, int]
    window: int | None = None

    def items(self) -> list[tuple[Shape, int]]:
        return sorted(self.shapes.items())

    def dims(self, theory: str) -> dict:
        out: dict = {}
        for s, m in self.shapes.items():
            for key, v in s.contribution(theory).items():
                out[key] = out.get(key, 0) + m * v
        return {k: v for k, v in out.items() if v}

    def only_squares_and_dots(self) -> bool:
        return all(s.kind == "square" or s.is_dot for s in self.shapes)

    def count(self, kind: str | None = None) -> int:
        return sum(m for s, m in self.shapes.items()
                   if kind is None or s.kind == kind or (kind == "dot" and s.is_dot))


def _square_part(D: DoubleComplex) -> dict[Bidegree, Subspace]:
    n = D.dim
    W = {}
    for p, q in D.support:
        K = kernel(D.ddbar(p, q))
        # complement of K spanned by standard vectors outside its pivot set
        ech = Subspace(n(p, q), K.sparse_basis())
        comp = []
        for j in range(n(p, q)):
            if ech.dim == n(p, q):
                break
            e = {j: ONE}
            before = ech.dim
            ech = span_sum(ech, Subspace(n(p, q), [e]))
            if ech.dim > before:
                comp.append(e)
        W[(p, q)] = Subspace(n(p, q), comp)
    sq = {}
    for p, q in D.support:
        parts = [W.get((p, q), Subspace.zero(n(p, q)))]
        if (p - 1, q) in W:
            parts.append(image(D.d1(p - 1, q), W[(p - 1, q)]))
        if (p, q - 1) in W:
            parts.append(image(D.d2(p, q - 1), W[(p, q - 1)]))
        if (p - 1, q - 1) in W:
            parts.append(image(D.ddbar(p - 1, q - 1), W[(p - 1, q - 1)]))
        acc = Subspace.zero(n(p, q))
        for s in parts:
            acc = span_sum(acc, s)
        sq[(p, q)] = acc
    return {"W": W, "Sq": sq}


def zigzag_decompose(D: DoubleComplex) -> ZigzagDecomposition:
    """Multiplicities of squares and zigzags in ``D``.

    Squares are counted by the rank of ∂∂̄.  On the remaining complex (where
    ∂∂̄ vanishes) each total degree gives a representation of an alternating
    type-A quiver between the non-image part ``C`` in degree k and the image
    part ``T`` in degree k+1; interval multiplicities come from Möbius
    inversion of the rank of ``lim -> colim`` over each interval.
    """
    parts = _square_part(D)
    W, Sq = parts["W"], parts["Sq"]
    shapes: dict[Shape, int] = {}
    for bd, w in W.items():
        if w.dim:
            shapes[Shape("square", (bd, (bd[0] + 1, bd[1]), (bd[0], bd[1] + 1), (bd[0] + 1, bd[1] + 1)))] = w.dim

    Cq: dict[Bidegree, QuotientPresentation] = {}
    Tq: dict[Bidegree, QuotientPresentation] = {}
    for p, q in D.support:
        n = D.dim(p, q)
        M = span_sum(span_sum(image(D.d1(p - 1, q)), image(D.d2(p, q - 1))), Sq[(p, q)])
        Cq[(p, q)] = QuotientPresentation(Subspace.full(n), M)
        Tq[(p, q)] = QuotientPresentation(M, Sq[(p, q)])

    def induced(p, q, which):
        """Matrix of C^{p,q} -> T^{target} induced by ∂ or ∂̄."""
        src = Cq[(p, q)]
        tb = (p + 1, q) if which == "del" else (p, q + 1)
        tgt = Tq.get(tb)
        if tgt is None or src.dim == 0 or tgt.dim == 0:
            return Matrix.zero(tgt.dim if tgt else 0, src.dim)
        d = D.d1(p, q) if which == "del" else D.d2(p, q)
        cols = [tgt.coordinates_sparse(d.apply_sparse(b)) for b in src.sparse_basis()]
        return Matrix.from_columns(cols, tgt.dim)

    degrees = sorted({p + q for p, q in D.support} | {p + q - 1 for p, q in D.support})
    for k in degrees:
        ps = sorted({p for p, q in D.support if p + q in (k, k + 1)})
        if not ps:
            continue
        p0, p1 = ps[0], ps[-1] + 1
        # vertex list along the line: T at p -> index 2(p-p0), C at p -> index 2(p-p0)+1
        verts = []
        for p in range(p0, p1 + 1):
            tb = (p, k + 1 - p)
            cb = (p, k - p)
            verts.append(("T", tb, Tq[tb].dim if tb in Tq else 0))
            verts.append(("C", cb, Cq[cb].dim if cb in Cq else 0))
        nv = len(verts)
        if not any(v[2] for v in verts) or not any(v[2] for v in verts if v[0] == "C"):
            continue
        edges = {}  # edge between i and i+1: matrix from C vertex to T vertex
        for i in range(nv - 1):
            a, b = verts[i], verts[i + 1]
            cvert, tvert = (b, a) if a[0] == "T" else (a, b)
            which = "dbar" if i % 2 == 0 else "del"
            if cvert[2] and tvert[2]:
                edges[i] = (which, induced(*cvert[1], which))
            else:
                edges[i] = (which, Matrix.zero(tvert[2], cvert[2]))

        ranks: dict[tuple[int, int], int] = {}

        def rk(a, b):
            if a < 0 or b >= nv or a > b:
                return 0
            key = (a, b)
            if key not in ranks:
                ranks[key] = _interval_rank(verts, edges, a, b)
            return ranks[key]

        for a in range(nv):
            if not verts[a][2]:
                continue
            for b in range(a, nv):
                if not verts[b][2]:
                    break
                m = rk(a, b) - rk(a - 1, b) - rk(a, b + 1) + rk(a - 1, b + 1)
                if m:
                    bds = tuple(verts[j][1] for j in range(a, b + 1))
                    arrows = tuple(edges[j][0] for j in range(a, b))
                    shapes[Shape("zigzag", bds, arrows)] = shapes.get(Shape("zigzag", bds, arrows), 0) + m
    return ZigzagDecomposition(shapes, D.window)


def _interval_rank(verts, edges, a: int, b: int) -> int:
    """Rank of lim -> colim for the quiver representation restricted to [a, b]."""
    offs, off = [], 0
    for j in range(a, b + 1):
        offs.append(off)
        off += verts[j][2]
    total = off
    if verts[a][2] == 0:
        return 0
    # constraints / relations: for each edge C -> T, (f v_C - v_T)
    cons_rows = []
    rel_vecs = []
    for j in range(a, b):
        which, M = edges[j]
        ci, ti = (j, j + 1) if verts[j][0] == "C" else (j + 1, j)
        co, to = offs[ci - a], offs[ti - a]
        # lim: f(v_C) - v_T = 0, one row per T coordinate
        for r in range(M.nrows):
            row = {co + c: x for c, x in M.rows[r].items()}
            row[to + r] = row.get(to + r, ZERO) - ONE
            cons_rows.append({k: v for k, v in row.items() if v})
        # colim relations: for each C basis vector e, ι_T f(e) - ι_C e
        cols = M.columns()
        for c in range(M.ncols):
            v = {to + r: x for r, x in cols[c].items()}
            v[co + c] = -ONE
            rel_vecs.append(v)
    lim = kernel(Matrix(len(cons_rows), total, cons_rows)) if cons_rows else Subspace.full(total)
    na = verts[a][2]
    # project lim onto vertex a, include back, and measure modulo relations
    R = Subspace(total, rel_vecs)
    proj = []
    for v in lim.sparse_basis():
        proj.append({k: x for k, x in v.items() if k < na})
    base = R.dim
    return span_sum(R, Subspace(total, proj)).dim - base


# ---------------------------------------------------------------------------
# maps and E1-isomorphism

@dataclass(frozen=True, eq=False)
class ComplexMap:
    source: DoubleComplex
    target: DoubleComplex
    maps: Mapping[Bidegree, Matrix]

    def at(self, p: int, q: int) -> Matrix:
        M = self.maps.get((p, q))
        return M if M is not None else Matrix.zero(self.target.dim(p, q), self.source.dim(p, q))

    def commutation_failures(self) -> list[Issue]:
        out = []
        S, T = self.source, self.target
        for p, q in sorted(set(S.dims) | set(T.dims)):
            if self.at(p, q).shape != (T.dim(p, q), S.dim(p, q)):
                out.append(Issue("shape", (p, q), "map block has the wrong shape"))
                continue
            if not _in_window(S, T, p + q + 1):
                continue
            if self.at(p + 1, q) @ S.d1(p, q) != T.d1(p, q) @ self.at(p, q):
                out.append(Issue("f del = del f", (p, q), "does not commute with ∂"))
            if self.at(p, q + 1) @ S.d2(p, q) != T.d2(p, q) @ self.at(p, q):
                out.append(Issue("f dbar = dbar f", (p, q), "does not commute with ∂̄"))
        return out

    def induced(self, theory: str, p: int, q: int = 0) -> tuple[Matrix, CohomologyGroup, CohomologyGroup]:
        """Matrix of the induced map in class coordinates."""
        th = normalize_theory(theory)
        hs = cohomology(self.source, th, p, q)
        ht = cohomology(self.target, th, p, q)
        if th == "deRham":
            Ts, Tt = total_complex(self.source), total_complex(self.target)
            blocks = []
            for bd in Tt.components.get(p, ()):
                row = []
                for sb in Ts.components.get(p, ()):
                    if sb == bd:
                        row.append(self.at(*bd))
                    else:
                        row.append(Matrix.zero(self.target.dim(*bd), self.source.dim(*sb)))
                blocks.append(row)
            F = Matrix.block(blocks) if blocks and Ts.components.get(p) else \
                Matrix.zero(Tt.dims.get(p, 0), Ts.dims.get(p, 0))
        else:
            F = self.at(p, q)
        cols = [ht.quotient.coordinates_sparse(F.apply_sparse(b)) for b in hs.quotient.sparse_basis()]
        return Matrix.from_columns(cols, ht.dim), hs, ht


def _in_window(S: DoubleComplex, T: DoubleComplex, k: int) -> bool:
    for D in (S, T):
        if D.window is not None and k > D.window + 1:
            return False
    return True


@dataclass(frozen=True)
class E1Witness:
    bidegree: Bidegree
    theory: str
    kind: str  # "kernel" or "cokernel"
    representative: tuple

    def describe(self) -> str:
        return f"{self.theory} cohomology at {self.bidegree}: nonzero {self.kind} class"


@dataclass(frozen=True)
class E1Verdict:
    is_iso: bool
    checked: tuple[Bidegree, ...]
    window: int | None
    witness: E1Witness | None = None

    def __bool__(self):
        return self.is_iso

    @property
    def range_label(self) -> str:
        return "all degrees" if self.window is None else f"up to degree {self.window}"


def combined_window(*cs: DoubleComplex) -> int | None:
    ws = [c.window for c in cs if c.window is not None]
    return min(ws) if ws else None


def e1_iso_check(f: ComplexMap) -> E1Verdict:
    """Is ``f`` an isomorphism on row and on column cohomology everywhere?"""
    fails = f.commutation_failures()
    if fails:
        i = fails[0]
        raise StructureError(f"not a map of double complexes at {i.bidegree}: {i.detail}", i.bidegree)
    window = combined_window(f.source, f.target)
    bds = sorted(bd for bd in set(f.source.dims) | set(f.target.dims)
                 if window is None or bd[0] + bd[1] <= window)
    for p, q in bds:
        for th in ("row", "column"):
            M, hs, ht = f.induced(th, p, q)
            if hs.dim == ht.dim and M.rank() == hs.dim:
                continue
            K = kernel(M)
            if K.dim:
                coords = K.basis[0]
                return E1Verdict(False, tuple(bds), window,
                                 E1Witness((p, q), th, "kernel", hs.quotient.representative(coords)))
            # cokernel: a target class outside the image
            img = image(M)
            for j in range(ht.dim):
                e = [ZERO] * ht.dim
                e[j] = ONE
                if not img.contains(e):
                    return E1Verdict(False, tuple(bds), window,
                                     E1Witness((p, q), th, "cokernel", ht.quotient.representative(e)))
    return E1Verdict(True, tuple(bds), window)


def identity_map(D: DoubleComplex) -> ComplexMap:
    return ComplexMap(D, D, {bd: Matrix.identity(D.dim(*bd)) for bd in D.support})


def zero_map(S: DoubleComplex, T: DoubleComplex) -> ComplexMap:
    return ComplexMap(S, T, {})


def direct_cohomology_dims(D: DoubleComplex) -> dict[str, dict]:
    """All five theories computed straight from the defining formulas."""
    out = {}
    for th in ("column", "row", "BC", "A"):
        out[th] = {bd: d for bd, d in ((bd, cohomology(D, th, *bd).dim) for bd in D.support) if d}
    T = total_complex(D)
    out["deRham"] = {k: d for k, d in ((k, T.cohomology(k).dim) for k in sorted(T.dims)) if d}
    return out


def decomposition_dims(Z: ZigzagDecomposition) -> dict[str, dict]:
    return {th: Z.dims(th) for th in ("column", "row", "BC", "A", "deRham")}
