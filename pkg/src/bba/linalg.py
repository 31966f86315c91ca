"""Exact linear algebra over the Gaussian rationals Q(i).

Vectors handed across the public API are tuples of :class:`Scalar`.  The
elimination kernels work on sparse rows (``dict`` column -> Scalar) since the
matrices coming out of monomial algebras are overwhelmingly sparse.

Every subspace is kept in reduced row echelon form, so two subspaces are equal
exactly when their stored bases are equal.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import ContainmentError, DimensionError

__all__ = [
    "Scalar",
    "ZERO",
    "ONE",
    "I",
    "Matrix",
    "Subspace",
    "QuotientPresentation",
    "AffineSolution",
    "rref",
    "kernel",
    "image",
    "solve_affine",
    "intersect",
    "span_sum",
    "preimage",
    "quotient",
    "coset_contains_zero",
    "as_scalar",
]

_MPQ0 = mpq(0)
_MPQ1 = mpq(1)


def _to_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x.strip()))
    return mpq(x)


class Scalar:
    """A Gaussian rational ``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_MPQ0) else _to_mpq(re)
        self.im = im if type(im) is type(_MPQ0) else _to_mpq(im)

    @classmethod
    def _raw(cls, re, im):
        s = object.__new__(cls)
        s.re = re
        s.im = im
        return s

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse ``a``, ``a/b``, ``i``, ``-2i``, ``1/2+3/4i`` or ``(a/b + c/d i)``."""
        return _parse_scalar(text)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or type(other) is type(_MPQ0):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        return NotImplemented

    def __hash__(self):
        return hash((Fraction(int(self.re.numerator), int(self.re.denominator)),
                     Fraction(int(self.im.numerator), int(self.im.denominator))))

    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            if not d:
                return Scalar._raw(a * c, _MPQ0)
            return Scalar._raw(a * c, a * d)
        if not d:
            return Scalar._raw(a * c, b * c)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        a, b = self.re, self.im
        if not b:
            return Scalar._raw(1 / a, _MPQ0)
        n = a * a + b * b
        return Scalar._raw(a / n, -b / n)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    def norm2(self):
        return self.re * self.re + self.im * self.im

    def to_fraction_pair(self) -> tuple[Fraction, Fraction]:
        return (Fraction(int(self.re.numerator), int(self.re.denominator)),
                Fraction(int(self.im.numerator), int(self.im.denominator)))

    def __str__(self):
        re_s = _fmt_q(self.re)
        if not self.im:
            return re_s
        if self.im == 1:
            im_s = "i"
        elif self.im == -1:
            im_s = "-i"
        else:
            im_s = _fmt_q(self.im) + "i"
        if not self.re:
            return im_s
        if im_s.startswith("-"):
            return f"({re_s} - {im_s[1:]})"
        return f"({re_s} + {im_s})"

    def __repr__(self):
        return f"Scalar({str(self)!r})"


def _fmt_q(q) -> str:
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, complex):
        return Scalar(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, str):
        return Scalar.parse(x)
    return Scalar(x)


_RAT = r"\d+(?:/\d+)?"
_TERM_RE = re.compile(rf"\s*([+-])?\s*({_RAT})?\s*(\*?\s*i)?\s*")


def _parse_scalar(text: str) -> Scalar:
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise ValueError("empty coefficient")
    pos = 0
    total = Scalar(0)
    seen = False
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"malformed coefficient {text!r} at column {pos + 1}")
        sign = -1 if m.group(1) == "-" else 1
        if seen and m.group(1) is None:
            raise ValueError(f"malformed coefficient {text!r} at column {pos + 1}")
        mag = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(3):
            total = total + Scalar(0, sign * mag)
        else:
            total = total + Scalar(sign * mag)
        seen = True
        pos = m.end()
    return total


# ---------------------------------------------------------------------------
# sparse row helpers

def _row_from_seq(seq: Sequence) -> dict:
    row = {}
    for j, x in enumerate(seq):
        if x:
            row[j] = x if isinstance(x, Scalar) else as_scalar(x)
    return row


def _as_row(v) -> dict:
    if isinstance(v, dict):
        return v
    return _row_from_seq(v)


def _dense(row: Mapping, n: int) -> tuple:
    out = [ZERO] * n
    for j, x in row.items():
        out[j] = x
    return tuple(out)


def _axpy(target: dict, coef: Scalar, row: Mapping) -> None:
    """target += coef * row, pruning zeros."""
    for j, x in row.items():
        y = target.get(j)
        v = coef * x if y is None else y + coef * x
        if v:
            target[j] = v
        elif y is not None:
            del target[j]


class _Echelon:
    """Incrementally maintained reduced row echelon basis."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int):
        self.n = n
        self.rows: dict[int, dict] = {}  # pivot column -> normalized row

    def reduce(self, v: Mapping) -> dict:
        r = dict(v)
        for c in [c for c in r if c in self.rows]:
            x = r.get(c)
            if x:
                _axpy(r, -x, self.rows[c])
        return r

    def add(self, v: Mapping) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        c = min(r)
        inv = r[c].inverse()
        r = {j: x * inv for j, x in r.items()}
        for row in self.rows.values():
            x = row.get(c)
            if x:
                _axpy(row, -x, r)
        self.rows[c] = r
        return True

    def sorted_rows(self) -> list[tuple[int, dict]]:
        return sorted(self.rows.items())


# ---------------------------------------------------------------------------

class Matrix:
    """An ``nrows x ncols`` matrix stored as sparse rows; acts on column vectors."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Mapping] | None = None):
        if nrows < 0 or ncols < 0:
            raise DimensionError("matrix dimensions must be nonnegative")
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self.rows = tuple({} for _ in range(nrows))
        else:
            if len(rows) != nrows:
                raise DimensionError(f"expected {nrows} rows, got {len(rows)}")
            clean = []
            for r in rows:
                r = _as_row(r)
                if any(j < 0 or j >= ncols for j in r):
                    raise DimensionError("entry column out of range")
                clean.append({j: as_scalar(x) for j, x in r.items() if x})
            self.rows = tuple(clean)

    @classmethod
    def _trusted(cls, nrows, ncols, rows):
        m = object.__new__(cls)
        m.nrows, m.ncols, m.rows = nrows, ncols, tuple(rows)
        return m

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "Matrix":
        return cls._trusted(nrows, ncols, [{} for _ in range(nrows)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._trusted(n, n, [{i: ONE} for i in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = list(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionError("ragged rows")
        return cls(len(rows), ncols, [_row_from_seq(r) for r in rows])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        rows = [{} for _ in range(nrows)]
        for j, col in enumerate(cols):
            for i, x in _as_row(col).items():
                if x:
                    rows[i][j] = as_scalar(x)
        return cls._trusted(nrows, len(cols), rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def entry(self, i: int, j: int) -> Scalar:
        return self.rows[i].get(j, ZERO)

    def to_dense(self) -> list[list[Scalar]]:
        return [list(_dense(r, self.ncols)) for r in self.rows]

    def is_zero(self) -> bool:
        return not any(self.rows)

    def transpose(self) -> "Matrix":
        out = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, x in r.items():
                out[j][i] = x
        return Matrix._trusted(self.ncols, self.nrows, out)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def conj(self) -> "Matrix":
        return Matrix._trusted(self.nrows, self.ncols,
                               [{j: x.conjugate() for j, x in r.items()} for r in self.rows])

    @property
    def H(self) -> "Matrix":
        """Conjugate transpose."""
        return self.transpose().conj()

    def column(self, j: int) -> tuple:
        return tuple(r.get(j, ZERO) for r in self.rows)

    def columns(self) -> list[dict]:
        cols = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def apply(self, v) -> tuple:
        """Matrix times column vector (any sequence or sparse dict)."""
        return _dense(self.apply_sparse(_as_row(v)), self.nrows)

    def apply_sparse(self, v: Mapping) -> dict:
        out = {}
        if not v:
            return out
        for i, r in enumerate(self.rows):
            if not r:
                continue
            acc = None
            if len(r) < len(v):
                for j, x in r.items():
                    y = v.get(j)
                    if y is not None:
                        acc = x * y if acc is None else acc + x * y
            else:
                for j, y in v.items():
                    x = r.get(j)
                    if x is not None:
                        acc = x * y if acc is None else acc + x * y
            if acc:
                out[i] = acc
        return out

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            out = []
            for r in self.rows:
                acc: dict = {}
                for k, x in r.items():
                    _axpy(acc, x, other.rows[k])
                out.append(acc)
            return Matrix._trusted(self.nrows, other.ncols, out)
        v = other if isinstance(other, dict) else tuple(other)
        if not isinstance(v, dict) and len(v) != self.ncols:
            raise DimensionError(f"vector of length {len(v)} against {self.shape}")
        return self.apply(v)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        out = []
        for a, b in zip(self.rows, other.rows):
            r = dict(a)
            _axpy(r, ONE, b)
            out.append(r)
        return Matrix._trusted(self.nrows, self.ncols, out)

    def __neg__(self) -> "Matrix":
        return self.scale(-ONE)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = as_scalar(c)
        if not c:
            return Matrix.zero(self.nrows, self.ncols)
        return Matrix._trusted(self.nrows, self.ncols,
                               [{j: c * x for j, x in r.items()} for r in self.rows])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(a == b for a, b in zip(self.rows, other.rows))

    def __hash__(self):
        return hash((self.nrows, self.ncols,
                     tuple(tuple(sorted((j, hash(x)) for j, x in r.items())) for r in self.rows)))

    @staticmethod
    def hstack(mats: Sequence["Matrix"], nrows: int | None = None) -> "Matrix":
        if not mats:
            return Matrix.zero(nrows or 0, 0)
        n = mats[0].nrows
        if any(m.nrows != n for m in mats):
            raise DimensionError("hstack row mismatch")
        rows = [{} for _ in range(n)]
        off = 0
        for m in mats:
            for i, r in enumerate(m.rows):
                for j, x in r.items():
                    rows[i][off + j] = x
            off += m.ncols
        return Matrix._trusted(n, off, rows)

    @staticmethod
    def vstack(mats: Sequence["Matrix"], ncols: int | None = None) -> "Matrix":
        if not mats:
            return Matrix.zero(0, ncols or 0)
        c = mats[0].ncols
        if any(m.ncols != c for m in mats):
            raise DimensionError("vstack column mismatch")
        rows = []
        for m in mats:
            rows.extend(dict(r) for r in m.rows)
        return Matrix._trusted(len(rows), c, rows)

    @staticmethod
    def block(blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        return Matrix.vstack([Matrix.hstack(list(row)) for row in blocks])

    def rank(self) -> int:
        return rref(self)[2]

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self.rows))})"


def rref(M: Matrix) -> tuple[Matrix, list[int], int]:
    """Reduced row echelon form, pivot columns and rank."""
    ech = _Echelon(M.ncols)
    for r in M.rows:
        ech.add(r)
    piv_rows = ech.sorted_rows()
    rows = [r for _, r in piv_rows] + [{} for _ in range(M.nrows - len(piv_rows))]
    pivots = [c for c, _ in piv_rows]
    return Matrix._trusted(M.nrows, M.ncols, rows), pivots, len(pivots)


class Subspace:
    """A linear subspace of Q(i)^n with canonical (RREF) basis."""

    __slots__ = ("ambient_dim", "_ech", "_basis")

    def __init__(self, ambient_dim: int, vectors: Iterable = ()):
        self.ambient_dim = ambient_dim
        ech = _Echelon(ambient_dim)
        for v in vectors:
            row = _as_row(v)
            if not isinstance(v, dict) and len(v) != ambient_dim:
                raise DimensionError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
            ech.add(row)
        self._ech = ech
        self._basis = None

    @classmethod
    def _from_echelon(cls, ech: _Echelon) -> "Subspace":
        s = object.__new__(cls)
        s.ambient_dim = ech.n
        s._ech = ech
        s._basis = None
        return s

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        ech = _Echelon(n)
        ech.rows = {i: {i: ONE} for i in range(n)}
        return cls._from_echelon(ech)

    @property
    def dim(self) -> int:
        return len(self._ech.rows)

    def __len__(self):
        return self.dim

    @property
    def pivots(self) -> list[int]:
        return sorted(self._ech.rows)

    def sparse_basis(self) -> list[dict]:
        return [r for _, r in self._ech.sorted_rows()]

    @property
    def basis(self) -> tuple[tuple, ...]:
        if self._basis is None:
            self._basis = tuple(_dense(r, self.ambient_dim) for r in self.sparse_basis())
        return self._basis

    def reduce(self, v) -> tuple:
        """Canonical normal form of ``v`` modulo this subspace."""
        return _dense(self._ech.reduce(_as_row(v)), self.ambient_dim)

    def reduce_sparse(self, v: Mapping) -> dict:
        return self._ech.reduce(v)

    def contains(self, v) -> bool:
        return not self._ech.reduce(_as_row(v))

    __contains__ = contains

    def coordinates(self, v) -> tuple:
        """Coordinates of ``v`` in the canonical basis; ``v`` must lie in the subspace."""
        row = _as_row(v)
        if self._ech.reduce(row):
            raise ContainmentError("vector not in subspace")
        return tuple(row.get(c, ZERO) for c in self.pivots)

    def is_subspace_of(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(not other._ech.reduce(r) for r in self._ech.rows.values())

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim
                and self._ech.sorted_rows() == other._ech.sorted_rows())

    def __hash__(self):
        return hash((self.ambient_dim, tuple(self.pivots)))

    def __add__(self, other: "Subspace") -> "Subspace":
        return span_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def annihilator_matrix(self) -> Matrix:
        """Rows spanning the annihilator under the bilinear pairing sum(a_i v_i)."""
        piv = self._ech.rows
        rows = []
        for f in range(self.ambient_dim):
            if f in piv:
                continue
            a = {f: ONE}
            for c, r in piv.items():
                x = r.get(f)
                if x:
                    a[c] = -x
            rows.append(a)
        return Matrix._trusted(len(rows), self.ambient_dim, rows)

    def as_matrix(self) -> Matrix:
        """Matrix whose columns are the canonical basis vectors."""
        return Matrix.from_columns(self.sparse_basis(), self.ambient_dim)

    def __repr__(self):
        return f"Subspace(dim={self.dim} in {self.ambient_dim})"


def _check_ambient(U: Subspace, V: Subspace) -> None:
    if U.ambient_dim != V.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {U.ambient_dim} vs {V.ambient_dim}")


def kernel(M: Matrix) -> Subspace:
    R, pivots, _ = rref(M)
    pivset = set(pivots)
    vecs = []
    for f in range(M.ncols):
        if f in pivset:
            continue
        v = {f: ONE}
        for i, c in enumerate(pivots):
            x = R.rows[i].get(f)
            if x:
                v[c] = -x
        vecs.append(v)
    return Subspace(M.ncols, vecs)


def image(M: Matrix, U: Subspace | None = None) -> Subspace:
    """Image of ``U`` (default: the whole source) under ``M``."""
    if U is None:
        return Subspace(M.nrows, M.columns())
    if U.ambient_dim != M.ncols:
        raise DimensionError("subspace does not live in the source of the matrix")
    return Subspace(M.nrows, [M.apply_sparse(b) for b in U.sparse_basis()])


def span_sum(U: Subspace, V: Subspace) -> Subspace:
    _check_ambient(U, V)
    ech = _Echelon(U.ambient_dim)
    ech.rows = {c: dict(r) for c, r in U._ech.rows.items()}
    for r in V._ech.rows.values():
        ech.add(r)
    return Subspace._from_echelon(ech)


def intersect(U: Subspace, V: Subspace) -> Subspace:
    _check_ambient(U, V)
    if U.dim == 0 or V.dim == 0:
        return Subspace.zero(U.ambient_dim)
    if U.dim == U.ambient_dim:
        return V
    if V.dim == V.ambient_dim:
        return U
    # U ∩ V = U-combinations whose image lies in V; solve in U's coordinates
    A = V.annihilator_matrix()
    B = U.as_matrix()
    K = kernel(A @ B)
    return image(B, K)


def preimage(M: Matrix, V: Subspace) -> Subspace:
    """{x : Mx in V}."""
    if V.ambient_dim != M.nrows:
        raise DimensionError("target subspace dimension mismatch")
    if V.dim == V.ambient_dim:
        return Subspace.full(M.ncols)
    return kernel(V.annihilator_matrix() @ M)


class AffineSolution:
    """Solution set of ``M x = b``: ``particular + kernel`` or infeasible."""

    __slots__ = ("feasible", "particular", "kernel")

    def __init__(self, feasible: bool, particular: tuple | None, kernel: Subspace):
        self.feasible = feasible
        self.particular = particular
        self.kernel = kernel

    def __bool__(self):
        return self.feasible

    def __repr__(self):
        return f"AffineSolution(feasible={self.feasible}, kernel_dim={self.kernel.dim})"


def solve_affine(M: Matrix, b) -> AffineSolution:
    b = _as_row(b)
    if any(i >= M.nrows for i in b):
        raise DimensionError("right-hand side longer than matrix rows")
    n = M.ncols
    aug = [dict(r) for r in M.rows]
    for i, x in b.items():
        aug[i][n] = x
    ech = _Echelon(n + 1)
    for r in aug:
        ech.add(r)
    K = kernel(M)
    if n in ech.rows:
        return AffineSolution(False, None, K)
    x0 = {}
    for c, r in ech.rows.items():
        v = r.get(n)
        if v:
            x0[c] = v
    return AffineSolution(True, _dense(x0, n), K)


class QuotientPresentation:
    """The quotient ``numerator / modulus`` with a canonical section.

    Canonical representatives are normal forms modulo the modulus; the quotient
    basis is the RREF basis of the reduced numerator vectors.
    """

    __slots__ = ("ambient", "modulus", "_reps")

    def __init__(self, ambient: Subspace, modulus: Subspace):
        _check_ambient(ambient, modulus)
        if not modulus.is_subspace_of(ambient):
            raise ContainmentError("modulus is not contained in the numerator")
        self.ambient = ambient
        self.modulus = modulus
        ech = _Echelon(ambient.ambient_dim)
        for r in ambient.sparse_basis():
            ech.add(modulus.reduce_sparse(r))
        self._reps = Subspace._from_echelon(ech)

    @property
    def dim(self) -> int:
        return self._reps.dim

    @property
    def ambient_dim(self) -> int:
        return self.ambient.ambient_dim

    def basis(self) -> tuple[tuple, ...]:
        """Canonical representatives of a basis of the quotient."""
        return self._reps.basis

    def sparse_basis(self) -> list[dict]:
        return self._reps.sparse_basis()

    def normal_form(self, v) -> tuple:
        return self.modulus.reduce(v)

    def contains(self, v) -> bool:
        return self.ambient.contains(v)

    def coordinates(self, v) -> tuple:
        """Class coordinates of an element of the numerator."""
        row = _as_row(v)
        if self.ambient.reduce_sparse(row):
            raise ContainmentError("vector is not in the numerator")
        r = self.modulus.reduce_sparse(row)
        return tuple(r.get(c, ZERO) for c in self._reps.pivots)

    def coordinates_sparse(self, v: Mapping) -> dict:
        r = self.modulus.reduce_sparse(v)
        out = {}
        for k, c in enumerate(self._reps.pivots):
            x = r.get(c)
            if x:
                out[k] = x
        return out

    def representative(self, coords) -> tuple:
        acc: dict = {}
        for c, b in zip(coords, self._reps.sparse_basis()):
            if c:
                _axpy(acc, as_scalar(c), b)
        return _dense(acc, self.ambient_dim)

    def __eq__(self, other):
        if not isinstance(other, QuotientPresentation):
            return NotImplemented
        return self.ambient == other.ambient and self.modulus == other.modulus

    def __hash__(self):
        return hash((self.ambient, self.modulus))

    def __repr__(self):
        return f"QuotientPresentation(dim={self.dim}: {self.ambient.dim}/{self.modulus.dim})"


def quotient(N: Subspace, D: Subspace) -> QuotientPresentation:
    return QuotientPresentation(N, D)


def coset_contains_zero(Q: QuotientPresentation, v) -> bool:
    return Q.modulus.contains(v)
