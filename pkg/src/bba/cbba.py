"""Graded-commutative bigraded bidifferential algebras.

Two concrete kinds are supported:

* :class:`PresentedCBBA` - free graded-commutative on generators modulo
  monomial relations, with ∂ and ∂̄ given on generators and extended by the
  graded Leibniz rule.  Basis keys are exponent tuples in declaration order.
* :class:`TableCBBA` - a finite basis with an explicit multiplication table.
  Basis keys are integers, ``0`` being the unit.

Signs follow the total degree: ``ab = (-1)^{|a||b|} ba`` and
``∂(ab) = ∂a·b + (-1)^{|a|} a·∂b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .bicomplex import ComplexMap, DoubleComplex, E1Verdict, e1_iso_check
from .errors import (
    AugmentationError,
    BBAError,
    StructureError,
    TruncationRequired,
)
from .formats import AlgebraFile, Generator, Poly, format_terms, parse_algebra, parse_class_expr, parse_poly
from .linalg import ONE, ZERO, Matrix, Scalar, as_scalar

Key = object
Bidegree = tuple[int, int]


def _add_into(acc: dict, key, c: Scalar) -> None:
    v = acc.get(key)
    v = c if v is None else v + c
    if v:
        acc[key] = v
    elif key in acc:
        del acc[key]


class OutOfRange:
    """Marker for a product that leaves the realized degree range."""

    def __init__(self, degree: int, bound: int):
        self.degree = degree
        self.bound = bound

    def __bool__(self):
        return False

    def __repr__(self):
        return f"OutOfRange(degree={self.degree}, bound={self.bound})"


class Element:
    """A Q(i)-linear combination of basis keys of a fixed algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: "CBBA", terms: Mapping | None = None):
        self.algebra = algebra
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def _wrap(self, terms):
        return Element(self.algebra, terms)

    def __add__(self, other):
        other = self.algebra.coerce(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(acc, k, v)
        return self._wrap(acc)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self.algebra.coerce(other))

    def __rsub__(self, other):
        return self.algebra.coerce(other) - self

    def scale(self, c) -> "Element":
        c = as_scalar(c)
        return self._wrap({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Element):
            return self.algebra.multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.algebra is other.algebra and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted((hash(k), hash(v)) for k, v in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def bidegree(self) -> Bidegree | None:
        """The common bidegree of all terms, or ``None`` if inhomogeneous or zero."""
        bds = {self.algebra.key_bidegree(k) for k in self.terms}
        return bds.pop() if len(bds) == 1 else None

    def degree(self) -> int | None:
        bd = self.bidegree()
        return None if bd is None else bd[0] + bd[1]

    def homogeneous_parts(self) -> dict[Bidegree, "Element"]:
        out: dict = {}
        for k, v in self.terms.items():
            out.setdefault(self.algebra.key_bidegree(k), {})[k] = v
        return {bd: self._wrap(t) for bd, t in out.items()}

    def d1(self) -> "Element":
        return self.algebra.d1(self)

    def d2(self) -> "Element":
        return self.algebra.d2(self)

    def ddbar(self) -> "Element":
        return self.algebra.d1(self.algebra.d2(self))

    def d(self) -> "Element":
        return self.d1() + self.d2()

    def conj(self) -> "Element":
        return self.algebra.conj(self)

    def __str__(self):
        return self.algebra.format(self)

    def __repr__(self):
        return f"Element({str(self)!r})"


class CBBA:
    """Common interface of both algebra kinds."""

    name: str
    has_conj: bool
    unit_key: Key

    # subclasses provide these
    def key_bidegree(self, key) -> Bidegree: ...
    def keys_of_bidegree(self, p: int, q: int, bound: int | None = None) -> list: ...
    def _mul_keys(self, a, b) -> dict: ...
    def _d_key(self, which: int, key) -> dict: ...
    def _conj_key(self, key) -> dict: ...
    def key_text(self, key) -> str: ...
    def bidegrees_up_to(self, bound: int | None) -> list[Bidegree]: ...

    top_degree: int | None = None  # None means infinite-dimensional
    metric: str | None = None

    def key_degree(self, key) -> int:
        p, q = self.key_bidegree(key)
        return p + q

    def coerce(self, x) -> Element:
        if isinstance(x, Element):
            if x.algebra is not self:
                raise BBAError("elements of different algebras")
            return x
        if isinstance(x, str):
            return self.parse(x)
        c = as_scalar(x)
        return Element(self, {self.unit_key: c} if c else {})

    def zero(self) -> Element:
        return Element(self)

    def one(self) -> Element:
        return Element(self, {self.unit_key: ONE})

    def basis_element(self, key) -> Element:
        return Element(self, {key: ONE})

    def multiply(self, a: Element, b: Element, bound: int | None = None):
        """Product; with ``bound`` set, returns :class:`OutOfRange` past it."""
        acc: dict = {}
        for ka, va in a.terms.items():
            for kb, vb in b.terms.items():
                for k, c in self._mul_keys(ka, kb).items():
                    _add_into(acc, k, va * vb * c)
        out = Element(self, acc)
        if bound is not None and acc:
            deg = max(self.key_degree(k) for k in acc)
            if deg > bound:
                return OutOfRange(deg, bound)
        return out

    def _apply(self, fn, a: Element) -> Element:
        acc: dict = {}
        for k, v in a.terms.items():
            for k2, c in fn(k).items():
                _add_into(acc, k2, v * c)
        return Element(self, acc)

    def d1(self, a: Element) -> Element:
        return self._apply(lambda k: self._d_key(0, k), a)

    def d2(self, a: Element) -> Element:
        return self._apply(lambda k: self._d_key(1, k), a)

    def conj(self, a: Element) -> Element:
        if not self.has_conj:
            raise BBAError(f"algebra {self.name!r} has no real structure")
        acc: dict = {}
        for k, v in a.terms.items():
            vc = v.conjugate()
            for k2, c in self._conj_key(k).items():
                _add_into(acc, k2, vc * c)
        return Element(self, acc)

    def format(self, a: Element) -> str:
        items = sorted(a.terms.items(), key=lambda kv: self._sort_key(kv[0]))
        return format_terms([(c, "" if k == self.unit_key else self.key_text(k)) for k, c in items])

    def _sort_key(self, key):
        return (self.key_degree(key),) + self._order_key(key)

    def _order_key(self, key) -> tuple:
        return (key,)

    # -- parsing ------------------------------------------------------------

    def from_poly(self, poly: Poly) -> Element:
        acc = self.zero()
        for coef, factors in poly:
            term = self.one().scale(coef)
            for name, exp in factors:
                g = self.name_element(name)
                for _ in range(exp):
                    term = term * g
            acc = acc + term
        return acc

    def parse(self, text: str) -> Element:
        return self.from_poly(parse_poly(text))

    def parse_class(self, text: str) -> Element:
        return self.from_poly(parse_class_expr(text))

    def name_element(self, name: str) -> Element: ...

    # -- realization --------------------------------------------------------

    def realize(self, N: int | None = None) -> "Realization":
        if N is None and self.top_degree is None:
            raise TruncationRequired(f"algebra {self.name!r} is infinite-dimensional; give a degree bound")
        if N is not None and N < 0:
            raise BBAError("degree bound must be nonnegative")
        return Realization(self, N)

    def default_bound(self, needed_degree: int) -> int | None:
        """Bound making cohomology exact through ``needed_degree``."""
        if self.top_degree is not None and self.top_degree <= needed_degree + 2:
            return None
        return needed_degree + 2


# ---------------------------------------------------------------------------

class PresentedCBBA(CBBA):
    def __init__(self, generators: Sequence[Generator], del_: Mapping[str, Poly] | None = None,
                 dbar: Mapping[str, Poly] | None = None, relations: Sequence = (),
                 conj: Mapping[str, Poly] | None = None, name: str = "", metric: str | None = None,
                 truncation: int | None = None):
        self.name = name
        self.metric = metric
        self.truncation = truncation
        self.generators = tuple(generators)
        self.gen_index = {g.name: i for i, g in enumerate(self.generators)}
        n = len(self.generators)
        self.n = n
        self.deg = tuple(g.p + g.q for g in self.generators)
        self.bideg = tuple(g.bidegree for g in self.generators)
        self.odd = tuple(d % 2 for d in self.deg)
        self.odd_idx = tuple(i for i in range(n) if self.odd[i])
        self.unit_key = (0,) * n
        self._rel_monos = []
        for factors in relations:
            e = [0] * n
            for nm, x in factors:
                e[self.gen_index[nm]] += x
            self._rel_monos.append(tuple(e))
        self._dcache: dict = {}
        self._raw_d = {0: {}, 1: {}}
        self.has_conj = bool(conj)
        self._conj_gen = {}
        self._source_del = dict(del_ or {})
        self._source_dbar = dict(dbar or {})
        self._source_conj = dict(conj or {})
        self.relations = tuple(relations)
        for which, table in ((0, del_ or {}), (1, dbar or {})):
            for nm, poly in table.items():
                self._raw_d[which][self.gen_index[nm]] = self.from_poly(poly).terms
        for nm, poly in (conj or {}).items():
            self._conj_gen[self.gen_index[nm]] = self.from_poly(poly)
        self.top_degree = self._compute_top_degree()
        self._check()

    @classmethod
    def from_file(cls, af: AlgebraFile) -> "PresentedCBBA":
        if af.kind != "presented":
            raise BBAError("not a generator presentation")
        return cls(af.generators, af.del_, af.dbar, af.relations, af.conj, af.name, af.metric, af.truncation)

    # -- monomial arithmetic ------------------------------------------------

    def key_bidegree(self, key) -> Bidegree:
        p = q = 0
        for e, (a, b) in zip(key, self.bideg):
            if e:
                p += e * a
                q += e * b
        return (p, q)

    def key_text(self, key) -> str:
        return "*".join(g.name if e == 1 else f"{g.name}^{e}"
                        for g, e in zip(self.generators, key) if e)

    def _order_key(self, key) -> tuple:
        return tuple(-e for e in key)

    def name_element(self, name: str) -> Element:
        if name not in self.gen_index:
            raise BBAError(f"unknown generator {name!r}")
        e = [0] * self.n
        e[self.gen_index[name]] = 1
        return self._mono_element(tuple(e))

    def _mono_element(self, e: tuple) -> Element:
        if self._killed(e):
            return self.zero()
        return Element(self, {e: ONE})

    def _killed(self, e) -> bool:
        for i in self.odd_idx:
            if e[i] > 1:
                return True
        for r in self._rel_monos:
            if all(x >= y for x, y in zip(e, r)):
                return True
        return False

    def _mul_mono(self, a: tuple, b: tuple, reduce: bool = True):
        sign = 1
        odd = self.odd
        for j, e in enumerate(b):
            if e and odd[j]:
                if a[j]:
                    return None
                cnt = 0
                for i in self.odd_idx:
                    if i > j and a[i]:
                        cnt += 1
                if cnt & 1:
                    sign = -sign
        new = tuple(x + y for x, y in zip(a, b))
        if reduce and self._killed(new):
            return None
        return sign, new

    def _mul_keys(self, a, b) -> dict:
        r = self._mul_mono(a, b)
        if r is None:
            return {}
        return {r[1]: ONE if r[0] > 0 else -ONE}

    def _times(self, A: Mapping, B: Mapping, reduce: bool = True) -> dict:
        acc: dict = {}
        for ka, va in A.items():
            for kb, vb in B.items():
                r = self._mul_mono(ka, kb, reduce)
                if r is not None:
                    _add_into(acc, r[1], va * vb if r[0] > 0 else -(va * vb))
        return acc

    def _d_key(self, which: int, key, reduce: bool = True) -> dict:
        ck = (which, key, reduce)
        hit = self._dcache.get(ck)
        if hit is not None:
            return hit
        acc: dict = {}
        prefix_deg = 0
        n = self.n
        for i in range(n):
            e = key[i]
            if not e:
                continue
            dg = self._raw_d[which].get(i)
            if dg:
                prefix = tuple(key[j] if j < i else 0 for j in range(n))
                rest = tuple(0 if j < i else (key[j] - 1 if j == i else key[j]) for j in range(n))
                coef = Scalar(e if prefix_deg % 2 == 0 else -e)
                part = self._times(self._times({prefix: coef}, dg, reduce), {rest: ONE}, reduce)
                for k, v in part.items():
                    _add_into(acc, k, v)
            prefix_deg += e * self.deg[i]
        self._dcache[ck] = acc
        return acc

    def _conj_key(self, key) -> dict:
        acc = {self.unit_key: ONE}
        for i, e in enumerate(key):
            g = self._conj_gen[i].terms
            for _ in range(e):
                acc = self._times(acc, g)
        return acc

    # -- structure ------------------------------------------------------------

    def _compute_top_degree(self) -> int | None:
        top = 0
        for i in range(self.n):
            if self.odd[i]:
                top += self.deg[i]
                continue
            pow_bound = None
            for r in self._rel_monos:
                if r[i] and sum(r) == r[i]:
                    pow_bound = r[i] - 1 if pow_bound is None else min(pow_bound, r[i] - 1)
            if pow_bound is None:
                return None
            top += pow_bound * self.deg[i]
        return top

    def _check(self) -> None:
        gens = self.generators
        for which, label, step in ((0, "del", (1, 0)), (1, "dbar", (0, 1))):
            for i, terms in self._raw_d[which].items():
                want = (gens[i].p + step[0], gens[i].q + step[1])
                for k in terms:
                    if self.key_bidegree(k) != want:
                        raise StructureError(
                            f"{label} {gens[i].name} has a term of bidegree {self.key_bidegree(k)}, expected {want}",
                            gens[i].name)
        for g in gens:
            x = self.name_element(g.name)
            for label, val in (("del^2", x.d1().d1()), ("dbar^2", x.d2().d2()),
                               ("del dbar + dbar del", x.d2().d1() + x.d1().d2())):
                if val:
                    raise StructureError(f"{label} of {g.name} is {val}, not 0", g.name)
        for r in self._rel_monos:
            for which in (0, 1):
                img = self._d_key(which, r, reduce=False)
                bad = [k for k in img if not self._killed(k)]
                if bad:
                    raise StructureError(
                        f"relation {self.key_text(r)} = 0 is not preserved by the differentials",
                        self.key_text(r))
        if self.has_conj:
            for i, g in enumerate(gens):
                if i not in self._conj_gen:
                    raise StructureError(f"conjugation not declared for {g.name}", g.name)
            for i, g in enumerate(gens):
                x = self.name_element(g.name)
                cx = x.conj()
                if cx and cx.bidegree() != (g.q, g.p):
                    raise StructureError(f"conj {g.name} has the wrong bidegree", g.name)
                if cx.conj() != x:
                    raise StructureError(f"conjugation is not an involution on {g.name}", g.name)
                if cx.d1() != x.d2().conj():
                    raise StructureError(
                        f"conjugation inconsistency: del(conj {g.name}) != conj(dbar {g.name})", g.name)
            for r in self._rel_monos:
                img = self._conj_key_free(r)
                if any(not self._killed(k) for k in img):
                    raise StructureError(f"relation {self.key_text(r)} is not conjugation-stable")

    def _conj_key_free(self, key) -> dict:
        acc = {self.unit_key: ONE}
        for i, e in enumerate(key):
            for _ in range(e):
                acc = self._times(acc, self._conj_gen[i].terms, reduce=False)
        return acc

    # -- enumeration --------------------------------------------------------------

    def _enumerate(self, bound: int) -> list[tuple]:
        out = []
        n = self.n

        def rec(i, cur, deg):
            if i == n:
                t = tuple(cur)
                if not self._killed(t):
                    out.append(t)
                return
            maxe = 1 if self.odd[i] else (bound - deg) // self.deg[i]
            for e in range(0, maxe + 1):
                if deg + e * self.deg[i] > bound:
                    break
                cur.append(e)
                rec(i + 1, cur, deg + e * self.deg[i])
                cur.pop()

        rec(0, [], 0)
        return out

    @cached_property
    def _all_keys_cache(self) -> dict:
        return {}

    def keys_up_to(self, bound: int | None) -> dict[Bidegree, list]:
        b = self.top_degree if bound is None else bound
        if self.top_degree is not None:
            b = min(b, self.top_degree)
        cache = self._all_keys_cache
        if b not in cache:
            groups: dict = {}
            for k in self._enumerate(b):
                groups.setdefault(self.key_bidegree(k), []).append(k)
            for bd in groups:
                groups[bd].sort(key=self._order_key)
            cache[b] = groups
        return cache[b]

    def keys_of_bidegree(self, p, q, bound=None):
        return list(self.keys_up_to(p + q if bound is None else bound).get((p, q), []))

    def dimension(self) -> int:
        if self.top_degree is None:
            raise TruncationRequired("infinite-dimensional algebra")
        return sum(len(v) for v in self.keys_up_to(None).values())

    def to_file(self) -> AlgebraFile:
        return AlgebraFile("presented", self.name, self.generators, self._source_del, self._source_dbar,
                           self._source_conj, self.relations, {}, self.truncation, self.metric)


# ---------------------------------------------------------------------------

class TableCBBA(CBBA):
    """A finite algebra given by a basis and its multiplication table.

    Unlisted products are zero; a listed product ``a b`` determines ``b a`` by
    graded commutativity unless that is listed as well (then it is checked).
    """

    def __init__(self, basis: Sequence[Generator], products: Mapping[tuple[str, str], Poly],
                 del_: Mapping[str, Poly] | None = None, dbar: Mapping[str, Poly] | None = None,
                 conj: Mapping[str, Poly] | None = None, name: str = "", metric: str | None = None):
        self.name = name
        self.metric = metric
        self.basis = tuple(basis)
        self.index = {g.name: i + 1 for i, g in enumerate(self.basis)}
        self.unit_key = 0
        self._bideg = [(0, 0)] + [g.bidegree for g in self.basis]
        self._table: dict[tuple[int, int], dict] = {}
        self._src = (dict(products), dict(del_ or {}), dict(dbar or {}), dict(conj or {}))
        for (a, b), poly in products.items():
            self._table[(self.index[a], self.index[b])] = self._linear(poly, (a, b))
        for (a, b), val in list(self._table.items()):
            sign = -ONE if (self.key_degree(a) * self.key_degree(b)) % 2 else ONE
            swapped = {k: sign * v for k, v in val.items()}
            if (b, a) in self._table:
                if self._table[(b, a)] != swapped:
                    raise StructureError(
                        f"products {self.key_text(a)}*{self.key_text(b)} and its reverse violate graded commutativity")
            else:
                self._table[(b, a)] = swapped
        self._d = {0: {}, 1: {}}
        for which, tab in ((0, del_ or {}), (1, dbar or {})):
            for nm, poly in tab.items():
                self._d[which][self.index[nm]] = self._linear(poly, nm)
        self.has_conj = bool(conj)
        self._conj = {}
        if conj:
            self._conj[0] = {0: ONE}
            for nm, poly in conj.items():
                self._conj[self.index[nm]] = self._linear(poly, nm)
        self.top_degree = max(self.key_degree(k) for k in range(len(self._bideg)))
        self._check()

    @classmethod
    def from_file(cls, af: AlgebraFile) -> "TableCBBA":
        if af.kind != "table":
            raise BBAError("not a product-table algebra")
        return cls(af.generators, af.products, af.del_, af.dbar, af.conj, af.name, af.metric)

    def _linear(self, poly: Poly, where) -> dict:
        """Evaluate a table polynomial whose terms are single basis names or 1."""
        acc: dict = {}
        for coef, factors in poly:
            flat = [n for n, e in factors for _ in range(e)]
            if not flat:
                _add_into(acc, 0, coef)
            elif len(flat) == 1:
                _add_into(acc, self.index[flat[0]], coef)
            else:
                raise StructureError(f"table entry for {where} must be linear in basis names")
        return acc

    def key_bidegree(self, key) -> Bidegree:
        return self._bideg[key]

    def key_text(self, key) -> str:
        return "1" if key == 0 else self.basis[key - 1].name

    def name_element(self, name: str) -> Element:
        if name == "1":
            return self.one()
        if name not in self.index:
            raise BBAError(f"unknown basis element {name!r}")
        return self.basis_element(self.index[name])

    def _mul_keys(self, a, b) -> dict:
        if a == 0:
            return {b: ONE}
        if b == 0:
            return {a: ONE}
        return self._table.get((a, b), {})

    def _d_key(self, which, key) -> dict:
        return self._d[which].get(key, {})

    def _conj_key(self, key) -> dict:
        return self._conj[key]

    def keys_up_to(self, bound: int | None) -> dict[Bidegree, list]:
        groups: dict = {}
        for k in range(len(self._bideg)):
            if bound is None or self.key_degree(k) <= bound:
                groups.setdefault(self._bideg[k], []).append(k)
        return groups

    def keys_of_bidegree(self, p, q, bound=None):
        return list(self.keys_up_to(bound).get((p, q), []))

    def dimension(self) -> int:
        return len(self._bideg)

    def _check(self) -> None:
        keys = range(len(self._bideg))
        for (a, b), val in self._table.items():
            want = tuple(x + y for x, y in zip(self._bideg[a], self._bideg[b]))
            for k in val:
                if self._bideg[k] != want:
                    raise StructureError(f"product {self.key_text(a)}*{self.key_text(b)} has the wrong bidegree")
        for which, step, label in ((0, (1, 0), "del"), (1, (0, 1), "dbar")):
            for a, val in self._d[which].items():
                want = (self._bideg[a][0] + step[0], self._bideg[a][1] + step[1])
                for k in val:
                    if self._bideg[k] != want:
                        raise StructureError(f"{label} {self.key_text(a)} has the wrong bidegree", self.key_text(a))
        els = [self.basis_element(k) for k in keys]
        for x in els[1:]:
            for label, val in (("del^2", x.d1().d1()), ("dbar^2", x.d2().d2()),
                               ("del dbar + dbar del", x.d2().d1() + x.d1().d2())):
                if val:
                    raise StructureError(f"{label} of {x} is {val}, not 0", str(x))
        for a in els[1:]:
            for b in els[1:]:
                ab = a * b
                sa = ONE if a.degree() % 2 == 0 else -ONE
                for label, d in (("del", CBBA.d1), ("dbar", CBBA.d2)):
                    lhs = d(self, ab)
                    rhs = d(self, a) * b + (a * d(self, b)).scale(sa)
                    if lhs != rhs:
                        raise StructureError(f"Leibniz rule for {label} fails on {a}*{b}", (str(a), str(b)))
                for c in els[1:]:
                    if self.key_degree(next(iter(a.terms))) + self.key_degree(next(iter(b.terms))) \
                            + self.key_degree(next(iter(c.terms))) > self.top_degree:
                        continue
                    if (a * b) * c != a * (b * c):
                        raise StructureError(f"product is not associative on {a}, {b}, {c}")
        if self.has_conj:
            for k in keys:
                if k not in self._conj:
                    raise StructureError(f"conjugation not declared for {self.key_text(k)}")
            for x in els:
                cx = x.conj()
                p, q = x.bidegree()
                if cx and cx.bidegree() != (q, p):
                    raise StructureError(f"conj {x} has the wrong bidegree")
                if cx.conj() != x:
                    raise StructureError(f"conjugation is not an involution on {x}")
                if cx.d1() != x.d2().conj():
                    raise StructureError(f"conjugation inconsistency on {x}")
            for a in els:
                for b in els:
                    if (a * b).conj() != a.conj() * b.conj():
                        raise StructureError(f"conjugation is not multiplicative on {a}, {b}")

    def to_file(self) -> AlgebraFile:
        prods, d1, d2, cj = self._src
        return AlgebraFile("table", self.name, self.basis, d1, d2, cj, (), prods, None, self.metric)


def build(af: AlgebraFile | str) -> CBBA:
    """Construct and verify an algebra from a parsed file or its text."""
    if isinstance(af, str):
        af = parse_algebra(af)
    if af.kind == "table":
        return TableCBBA.from_file(af)
    return PresentedCBBA.from_file(af)


# ---------------------------------------------------------------------------
# realization

class Realization:
    """Per-bidegree matrices of an algebra up to total degree ``bound``."""

    def __init__(self, algebra: CBBA, bound: int | None):
        self.algebra = algebra
        if bound is not None and algebra.top_degree is not None and bound >= algebra.top_degree:
            bound = None
        self.bound = bound
        self.keys = algebra.keys_up_to(bound)
        self.index = {}
        for bd, ks in self.keys.items():
            for i, k in enumerate(ks):
                self.index[k] = (bd, i)
        self.window = None if bound is None else bound - 2
        self.complex = self._build_complex()

    @property
    def bidegrees(self) -> list[Bidegree]:
        return sorted(self.keys)

    def dim(self, p, q) -> int:
        return len(self.keys.get((p, q), ()))

    def in_range(self, degree: int) -> bool:
        return self.bound is None or degree <= self.bound

    def _matrix_of(self, fn, src: Bidegree, tgt: Bidegree) -> Matrix:
        rows = [{} for _ in range(self.dim(*tgt))]
        for j, k in enumerate(self.keys.get(src, ())):
            for k2, c in fn(k).items():
                hit = self.index.get(k2)
                if hit is None:
                    continue  # beyond the bound
                rows[hit[1]][j] = c
        return Matrix._trusted(self.dim(*tgt), self.dim(*src), rows)

    def _build_complex(self) -> DoubleComplex:
        A = self.algebra
        dims = {bd: len(ks) for bd, ks in self.keys.items()}
        del_, dbar = {}, {}
        for (p, q) in dims:
            del_[(p, q)] = self._matrix_of(lambda k: A._d_key(0, k), (p, q), (p + 1, q))
            dbar[(p, q)] = self._matrix_of(lambda k: A._d_key(1, k), (p, q), (p, q + 1))
        conj = None
        if A.has_conj:
            conj = {(p, q): self._matrix_of(A._conj_key, (p, q), (q, p)) for (p, q) in dims}
        labels = {bd: [A.key_text(k) if k != A.unit_key else "1" for k in ks] for bd, ks in self.keys.items()}
        return DoubleComplex(dims, del_, dbar, labels, conj, self.window)

    # -- conversions ---------------------------------------------------------------

    def vector(self, a: Element, bidegree: Bidegree | None = None) -> tuple:
        """Coordinates of a homogeneous element in its bidegree."""
        bd = bidegree if bidegree is not None else a.bidegree()
        if bd is None:
            if a.is_zero():
                raise BBAError("zero element needs an explicit bidegree")
            raise BBAError(f"element {a} is not homogeneous")
        out = [ZERO] * self.dim(*bd)
        for k, c in a.terms.items():
            hit = self.index.get(k)
            if hit is None:
                raise BBAError(f"term {self.algebra.key_text(k)} lies beyond the realized bound")
            if hit[0] != bd:
                raise BBAError(f"element {a} is not of bidegree {bd}")
            out[hit[1]] = c
        return tuple(out)

    def sparse(self, a: Element, bidegree: Bidegree) -> dict:
        return {i: c for i, c in enumerate(self.vector(a, bidegree)) if c}

    def element(self, bidegree: Bidegree, vec) -> Element:
        ks = self.keys.get(bidegree, ())
        if isinstance(vec, dict):
            return Element(self.algebra, {ks[i]: c for i, c in vec.items() if c})
        return Element(self.algebra, {ks[i]: c for i, c in enumerate(vec) if c})

    def mult_matrix(self, a: Element, src: Bidegree, right: bool = False) -> Matrix:
        """Matrix of x ↦ a·x (or x ↦ x·a) from ``src`` to ``src + |a|``."""
        A = self.algebra
        bd = a.bidegree()
        if bd is None:
            if a.is_zero():
                return None
            raise BBAError(f"element {a} is not homogeneous")
        tgt = (src[0] + bd[0], src[1] + bd[1])

        def fn(k):
            acc: dict = {}
            for ka, ca in a.terms.items():
                prod = A._mul_keys(k, ka) if right else A._mul_keys(ka, k)
                for k2, c in prod.items():
                    _add_into(acc, k2, ca * c)
            return acc

        return self._matrix_of(fn, src, tgt)


# ---------------------------------------------------------------------------
# augmentation ideal and tensor powers

@dataclass(frozen=True, eq=False)
class AugmentationIdeal:
    """The positive-degree part of a connected algebra, truncated at ``bound``."""

    realization: Realization

    @property
    def algebra(self) -> CBBA:
        return self.realization.algebra

    @property
    def bound(self) -> int | None:
        return self.realization.bound

    @cached_property
    def keys(self) -> dict[Bidegree, list]:
        return {bd: ks for bd, ks in self.realization.keys.items() if bd != (0, 0)}

    @cached_property
    def complex(self) -> DoubleComplex:
        D = self.realization.complex
        dims = {bd: n for bd, n in D.dims.items() if bd != (0, 0)}
        del_ = {bd: D.d1(*bd) for bd in dims}
        dbar = {bd: D.d2(*bd) for bd in dims}
        return DoubleComplex(dims, del_, dbar, {bd: D.label(*bd) for bd in dims}, None, D.window)

    @property
    def dim(self) -> int:
        return sum(len(v) for v in self.keys.values())

    def contains(self, a: Element) -> bool:
        return all(self.algebra.key_bidegree(k) != (0, 0) for k in a.terms)


def augmentation_ideal(A: CBBA | Realization, N: int | None = None) -> AugmentationIdeal:
    R = A if isinstance(A, Realization) else A.realize(N)
    if R.dim(0, 0) != 1:
        raise AugmentationError(f"dim A^(0,0) = {R.dim(0, 0)}; augmentation needs exactly the unit")
    for bd in R.keys:
        if bd != (0, 0) and bd[0] + bd[1] <= 0:
            raise AugmentationError(f"nonpositive total degree at {bd}")
    return AugmentationIdeal(R)


@dataclass(frozen=True, eq=False)
class TensorPower:
    """``(A⁺)^{⊗k}`` as a double complex, basis = tuples of A⁺ keys."""

    ideal: AugmentationIdeal
    k: int
    complex: DoubleComplex
    keys: Mapping[Bidegree, list]
    index: Mapping[tuple, tuple]

    def vector(self, terms: Mapping[tuple, Scalar], bidegree: Bidegree) -> dict:
        out = {}
        for t, c in terms.items():
            hit = self.index.get(t)
            if hit is None:
                continue
            if hit[0] != bidegree:
                raise BBAError("tensor is not of the requested bidegree")
            out[hit[1]] = c
        return out


def _tensor_keys(ideal: AugmentationIdeal, k: int, degrees: set | None, N: int | None):
    flat = [(bd, key) for bd in sorted(ideal.keys) for key in ideal.keys[bd]]
    by_deg: dict = {}
    for bd, key in flat:
        by_deg.setdefault(bd[0] + bd[1], []).append((bd, key))
    degs = sorted(by_deg)
    max_total = None
    if degrees is not None:
        max_total = max(degrees) if degrees else -1
    if N is not None:
        max_total = N if max_total is None else min(max_total, N)
    out: dict = {}

    def rec(i, cur, p, q):
        if i == k:
            if degrees is None or p + q in degrees:
                out.setdefault((p, q), []).append(tuple(cur))
            return
        remaining_min = (k - i - 1) * (degs[0] if degs else 0)
        for dg in degs:
            if max_total is not None and p + q + dg + remaining_min > max_total:
                break
            for bd, key in by_deg[dg]:
                cur.append(key)
                rec(i + 1, cur, p + bd[0], q + bd[1])
                cur.pop()

    rec(0, [], 0, 0)
    return out


def tensor_power(ideal: AugmentationIdeal, k: int, N: int | None = None,
                 degrees: Iterable[int] | None = None) -> TensorPower:
    """The k-fold tensor power with d(a⊗b) = da⊗b + (-1)^{|a|} a⊗db.

    ``N`` bounds the total degree; ``degrees`` restricts to a set of total
    degrees (differentials into omitted degrees are dropped).
    """
    if k < 1:
        raise BBAError("tensor power needs k >= 1")
    A = ideal.algebra
    degs = set(degrees) if degrees is not None else None
    keys = _tensor_keys(ideal, k, degs, N)
    index = {}
    for bd, ts in keys.items():
        for i, t in enumerate(ts):
            index[t] = (bd, i)
    in_ideal = {key for ks in ideal.keys.values() for key in ks}

    def d_tensor(which, t):
        acc: dict = {}
        sign_deg = 0
        for pos, key in enumerate(t):
            for k2, c in A._d_key(which, key).items():
                if k2 not in in_ideal:
                    continue
                nt = t[:pos] + (k2,) + t[pos + 1:]
                _add_into(acc, nt, c if sign_deg % 2 == 0 else -c)
            sign_deg += A.key_degree(key)
        return acc

    dims = {bd: len(ts) for bd, ts in keys.items()}
    del_, dbar = {}, {}
    for (p, q), ts in keys.items():
        for which, tgt, store in ((0, (p + 1, q), del_), (1, (p, q + 1), dbar)):
            rows = [{} for _ in range(dims.get(tgt, 0))]
            for j, t in enumerate(ts):
                for nt, c in d_tensor(which, t).items():
                    hit = index.get(nt)
                    if hit is not None:
                        rows[hit[1]][j] = c
            store[(p, q)] = Matrix._trusted(dims.get(tgt, 0), len(ts), rows)
    D = DoubleComplex(dims, del_, dbar, window=None if N is None else N - 2)
    return TensorPower(ideal, k, D, keys, index)


# ---------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True)
class MorphismVerdict:
    ok: bool
    issues: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class CbbaMorphism:
    source: CBBA
    target: CBBA
    images: Mapping[str, Element]  # generator (or basis) name -> image

    @classmethod
    def from_polys(cls, source: CBBA, target: CBBA, polys: Mapping[str, Poly]) -> "CbbaMorphism":
        return cls(source, target, {g: target.from_poly(p) for g, p in polys.items()})

    @classmethod
    def identity(cls, A: CBBA) -> "CbbaMorphism":
        return cls(A, A, {n: A.name_element(n) for n in _source_names(A)})

    def image_of(self, name: str) -> Element:
        img = self.images.get(name)
        return img if img is not None else self.target.zero()

    def apply(self, a: Element) -> Element:
        T = self.target
        acc = T.zero()
        for key, c in a.terms.items():
            acc = acc + self._apply_key(key).scale(c)
        return acc

    def _apply_key(self, key) -> Element:
        S, T = self.source, self.target
        if key == S.unit_key:
            return T.one()
        if isinstance(S, PresentedCBBA):
            out = T.one()
            for g, e in zip(S.generators, key):
                img = self.image_of(g.name)
                for _ in range(e):
                    out = out * img
            return out
        return self.image_of(S.key_text(key))

    def matrix(self, RS: Realization, RT: Realization, bd: Bidegree) -> Matrix:
        rows = [{} for _ in range(RT.dim(*bd))]
        for j, key in enumerate(RS.keys.get(bd, ())):
            img = self._apply_key(key)
            for k2, c in img.terms.items():
                hit = RT.index.get(k2)
                if hit is None:
                    continue
                if hit[0] != bd:
                    raise StructureError(f"image of {RS.algebra.key_text(key)} changes bidegree")
                rows[hit[1]][j] = c
        return Matrix._trusted(RT.dim(*bd), RS.dim(*bd), rows)

    def complex_map(self, N: int | None = None) -> tuple[ComplexMap, Realization, Realization]:
        bound = _common_bound(self.source, self.target, N)
        RS = self.source.realize(bound if self.source.top_degree is None or bound is not None else None)
        RT = self.target.realize(bound if self.target.top_degree is None or bound is not None else None)
        maps = {bd: self.matrix(RS, RT, bd) for bd in set(RS.keys) | set(RT.keys)}
        return ComplexMap(RS.complex, RT.complex, maps), RS, RT


def _source_names(A: CBBA) -> list[str]:
    if isinstance(A, PresentedCBBA):
        return [g.name for g in A.generators]
    return [g.name for g in A.basis]


def _common_bound(S: CBBA, T: CBBA, N: int | None) -> int | None:
    if N is not None:
        return N
    tops = [a.top_degree for a in (S, T)]
    if any(t is None for t in tops):
        finite = [t for t in tops if t is not None]
        if not finite:
            raise TruncationRequired("both algebras are infinite-dimensional; give a degree bound")
        return max(finite) + 2
    return None


def check_morphism(f: CbbaMorphism) -> MorphismVerdict:
    """Bidegrees, relations, products, differentials and conjugation."""
    S, T = f.source, f.target
    issues = []
    names = _source_names(S)
    for nm in f.images:
        if nm not in names:
            issues.append(f"image given for unknown name {nm!r}")
    for nm in names:
        g = S.name_element(nm)
        img = f.image_of(nm)
        if img and img.bidegree() != g.bidegree():
            issues.append(f"image of {nm} has bidegree {img.bidegree()}, expected {g.bidegree()}")
        if f.apply(g.d1()) != img.d1():
            issues.append(f"f(del {nm}) != del f({nm})")
        if f.apply(g.d2()) != img.d2():
            issues.append(f"f(dbar {nm}) != dbar f({nm})")
        if S.has_conj and T.has_conj and f.apply(g.conj()) != img.conj():
            issues.append(f"f(conj {nm}) != conj f({nm})")
    if isinstance(S, PresentedCBBA):
        for r in S._rel_monos:
            if f._apply_key(r):
                issues.append(f"relation {S.key_text(r)} = 0 is not respected")
    else:
        els = [S.basis_element(k) for k in range(1, S.dimension())]
        for a in els:
            for b in els:
                if f.apply(a * b) != f.apply(a) * f.apply(b):
                    issues.append(f"f({a}*{b}) != f({a})*f({b})")
    return MorphismVerdict(not issues, tuple(issues))


@dataclass(frozen=True)
class WeakEquivalenceVerdict:
    is_weak_equivalence: bool
    morphism: MorphismVerdict
    e1: E1Verdict | None
    window: int | None

    def __bool__(self):
        return self.is_weak_equivalence

    @property
    def range_label(self) -> str:
        return "all degrees" if self.window is None else f"up to degree {self.window}"


def is_weak_equivalence(f: CbbaMorphism, N: int | None = None) -> WeakEquivalenceVerdict:
    mv = check_morphism(f)
    if not mv:
        return WeakEquivalenceVerdict(False, mv, None, None)
    F, RS, RT = f.complex_map(N)
    ev = e1_iso_check(F)
    return WeakEquivalenceVerdict(ev.is_iso, mv, ev, ev.window)
