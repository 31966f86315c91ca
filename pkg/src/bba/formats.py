"""Text formats for algebra presentations, product tables and maps.

Polynomials are sums of terms ``coef*mon`` where ``mon`` is a ``*``-product of
generator powers (``x^2*y``) and ``coef`` follows the scalar grammar of
:meth:`bba.linalg.Scalar.parse`.  ``1`` denotes the unit.  Parsing is purely
syntactic; the algebra evaluates the resulting term lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .linalg import ONE, Scalar

Term = tuple[Scalar, tuple[tuple[str, int], ...]]  # coefficient, ordered factors
Poly = tuple[Term, ...]

_NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_NAME_RE = re.compile(_NAME + r"$")
_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>\d+(?:/\d+)?(?:i(?![A-Za-z0-9_']))?)"
    r"|(?P<name>" + _NAME + r")"
    r"|(?P<op>[-+*^()])"
)
RESERVED = {"i"}


def _tokenize(text: str, line: int | None, col0: int):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), col0 + pos + 1))
        pos = m.end()
        # a number directly followed by '/' means a malformed fraction
        if kind == "num" and pos < len(text) and text[pos] == "/":
            raise ParseError(f"malformed coefficient near {text[m.start():pos + 1]!r}", line, col0 + pos + 1)
    return out


def _num_scalar(tok: str) -> Scalar:
    if tok.endswith("i"):
        return Scalar(0, 1) * Scalar.parse(tok[:-1])
    return Scalar.parse(tok)


def parse_poly(text: str, line: int | None = None, col0: int = 0) -> Poly:
    """Parse a polynomial into ordered terms; raises ParseError with a position."""
    toks = _tokenize(text, line, col0)
    if not toks:
        raise ParseError("empty polynomial", line, col0 + 1)
    pos = 0
    terms: list[Term] = []

    def peek():
        return toks[pos] if pos < len(toks) else None

    def err(msg, tok=None):
        col = tok[2] if tok else col0 + len(text) + 1
        raise ParseError(msg, line, col)

    first = True
    while pos < len(toks):
        sign = ONE
        t = peek()
        if t[0] == "op" and t[1] in "+-":
            sign = -ONE if t[1] == "-" else ONE
            pos += 1
        elif not first:
            err(f"expected '+' or '-', got {t[1]!r}", t)
        first = False
        coef = sign
        factors: list[tuple[str, int]] = []
        expect_factor = True
        while expect_factor:
            t = peek()
            if t is None:
                err("unexpected end of polynomial")
            kind, val, col = t
            if kind == "num":
                coef = coef * _num_scalar(val)
                pos += 1
            elif kind == "name" and val == "i":
                coef = coef * Scalar(0, 1)
                pos += 1
            elif kind == "name":
                pos += 1
                exp = 1
                if peek() and peek()[1] == "^":
                    pos += 1
                    e = peek()
                    if e is None or e[0] != "num" or not e[1].isdigit():
                        err("exponent must be a nonnegative integer", e)
                    exp = int(e[1])
                    pos += 1
                if exp:
                    factors.append((val, exp))
            elif kind == "op" and val == "(":
                depth, j = 1, pos + 1
                while j < len(toks) and depth:
                    if toks[j][1] == "(":
                        depth += 1
                    elif toks[j][1] == ")":
                        depth -= 1
                    j += 1
                if depth:
                    err("unbalanced parenthesis", t)
                start = col - col0 - 1
                end = toks[j - 1][2] - col0
                inner = text[start:end]
                try:
                    coef = coef * Scalar.parse(inner)
                except ValueError as exc:
                    err(f"malformed coefficient {inner!r}: {exc}", t)
                pos = j
            else:
                err(f"unexpected token {val!r}", t)
            t = peek()
            if t is not None and t[1] == "*":
                pos += 1
                expect_factor = True
            else:
                expect_factor = False
        terms.append((coef, tuple(factors)))
    return tuple(terms)


def format_scalar_coef(c: Scalar, first: bool) -> tuple[str, str]:
    """Sign and magnitude text for a coefficient in a polynomial."""
    if c.is_real():
        sign = "-" if c.re < 0 else "+"
        mag = -c if c.re < 0 else c
        return sign, ("" if mag == 1 else str(mag))
    if not c.re:
        sign = "-" if c.im < 0 else "+"
        mag = -c if c.im < 0 else c
        return sign, str(mag)
    return "+", str(c)


def format_terms(pairs: list[tuple[Scalar, str]]) -> str:
    """Render ``[(coef, monomial_text)]``; an empty monomial text is the unit."""
    if not pairs:
        return "0"
    out = []
    for k, (c, mon) in enumerate(pairs):
        sign, mag = format_scalar_coef(c, k == 0)
        if mon:
            body = f"{mag}*{mon}" if mag else mon
        else:
            body = mag or "1"
        if k == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ---------------------------------------------------------------------------
# algebra files

@dataclass(frozen=True)
class Generator:
    name: str
    p: int
    q: int

    @property
    def parity(self) -> int:
        return (self.p + self.q) % 2

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.p, self.q)


@dataclass(frozen=True)
class AlgebraFile:
    """Either a generator presentation (``kind == "presented"``) or a basis
    with an explicit product table (``kind == "table"``)."""

    kind: str
    name: str
    generators: tuple[Generator, ...]
    del_: dict = field(default_factory=dict)
    dbar: dict = field(default_factory=dict)
    conj: dict = field(default_factory=dict)  # name -> Poly
    relations: tuple[tuple[tuple[str, int], ...], ...] = ()
    products: dict = field(default_factory=dict)  # (a, b) -> Poly
    truncation: int | None = None
    metric: str | None = None


_KEYS = {"name", "truncation", "gen", "basis", "conj", "rel", "del", "dbar", "prod", "metric"}


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_algebra(text: str) -> AlgebraFile:
    name = ""
    truncation = None
    gens: list[Generator] = []
    kind = None
    del_, dbar, conj, prods = {}, {}, {}, {}
    rels = []
    metric = None
    seen_names = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        parts = line.split(None, 1)
        key = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        rest_col = line.find(rest, indent + len(key)) if rest else len(line)
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", ln, indent + 1)
        if key == "name":
            name = rest.strip()
        elif key == "truncation":
            r = rest.strip()
            if r == "none":
                truncation = None
            elif r.isdigit():
                truncation = int(r)
            else:
                raise ParseError(f"truncation must be an integer or 'none', got {r!r}", ln, rest_col + 1)
        elif key in ("gen", "basis"):
            this = "presented" if key == "gen" else "table"
            if kind is not None and kind != this:
                raise ParseError("cannot mix 'gen' and 'basis' declarations", ln, indent + 1)
            kind = this
            f = rest.split()
            if len(f) != 3:
                raise ParseError(f"expected '{key} <name> <p> <q>'", ln, indent + 1)
            g, p, q = f
            if not _NAME_RE.match(g) or g in RESERVED or g == "1":
                raise ParseError(f"invalid name {g!r}", ln, rest_col + 1)
            if g in seen_names:
                raise ParseError(f"duplicate declaration of {g!r}", ln, rest_col + 1)
            try:
                p, q = int(p), int(q)
            except ValueError:
                raise ParseError("bidegree must be two integers", ln, rest_col + 1) from None
            if p < 0 or q < 0 or p + q == 0:
                raise ParseError(f"bidegree ({p},{q}) of {g!r} must be nonnegative and nonzero", ln, rest_col + 1)
            seen_names.add(g)
            gens.append(Generator(g, p, q))
        elif key == "conj":
            if "=" in rest:
                lhs, rhs = rest.split("=", 1)
                a = lhs.strip()
                conj[a] = parse_poly(rhs, ln, rest_col + len(lhs) + 1)
            else:
                f = rest.split()
                if len(f) != 2:
                    raise ParseError("expected 'conj <a> <b>' or 'conj <a> = <poly>'", ln, indent + 1)
                a, b = f
                conj[a] = ((ONE, ((b, 1),)),)
                conj[b] = ((ONE, ((a, 1),)),)
        elif key == "rel":
            if "=" not in rest:
                raise ParseError("expected 'rel <mon> = 0'", ln, indent + 1)
            lhs, rhs = rest.split("=", 1)
            if rhs.strip() != "0":
                raise ParseError("only monomial relations '<mon> = 0' are supported", ln, rest_col + len(lhs) + 2)
            poly = parse_poly(lhs, ln, rest_col)
            if len(poly) != 1 or poly[0][0] != ONE or not poly[0][1]:
                raise ParseError("relation must be a single monomial", ln, rest_col + 1)
            rels.append(poly[0][1])
        elif key in ("del", "dbar"):
            if "=" not in rest:
                raise ParseError(f"expected '{key} <name> = <poly>'", ln, indent + 1)
            lhs, rhs = rest.split("=", 1)
            g = lhs.strip()
            target = del_ if key == "del" else dbar
            if g in target:
                raise ParseError(f"duplicate {key} for {g!r}", ln, rest_col + 1)
            target[g] = parse_poly(rhs, ln, rest_col + len(lhs) + 1)
        elif key == "prod":
            if "=" not in rest:
                raise ParseError("expected 'prod <a> <b> = <poly>'", ln, indent + 1)
            lhs, rhs = rest.split("=", 1)
            f = lhs.split()
            if len(f) != 2:
                raise ParseError("expected two basis names before '='", ln, rest_col + 1)
            prods[(f[0], f[1])] = parse_poly(rhs, ln, rest_col + len(lhs) + 1)
        elif key == "metric":
            if rest.strip() != "orthonormal":
                raise ParseError("only 'metric orthonormal' is supported", ln, rest_col + 1)
            metric = "orthonormal"
    if not gens:
        raise ParseError("no generators")
    if kind == "presented" and prods:
        raise ParseError("'prod' lines need a 'basis' declaration, not 'gen'")
    if kind == "table" and rels:
        raise ParseError("'rel' lines need 'gen' declarations, not 'basis'")
    known = {g.name for g in gens}
    for table, label in ((del_, "del"), (dbar, "dbar"), (conj, "conj")):
        for g, poly in table.items():
            if g not in known:
                raise ParseError(f"{label} for undeclared name {g!r}")
            _check_names(poly, known)
    for mon in rels:
        _check_names(((ONE, mon),), known)
    for (a, b), poly in prods.items():
        if a not in known or b not in known:
            raise ParseError(f"product of undeclared names {a!r}, {b!r}")
        _check_names(poly, known)
    return AlgebraFile(kind, name, tuple(gens), del_, dbar, conj, tuple(rels), prods, truncation, metric)


def _check_names(poly: Poly, known: set) -> None:
    for _, factors in poly:
        for n, _ in factors:
            if n not in known:
                raise ParseError(f"unknown name {n!r} in polynomial")


def _poly_text(poly: Poly) -> str:
    pairs = []
    for c, factors in poly:
        mon = "*".join(n if e == 1 else f"{n}^{e}" for n, e in factors)
        pairs.append((c, mon))
    return format_terms(pairs)


def serialize_algebra(af: AlgebraFile) -> str:
    """Canonical text of an algebra file (parse-stable)."""
    lines = []
    if af.name:
        lines.append(f"name {af.name}")
    if af.kind == "presented":
        lines.append(f"truncation {'none' if af.truncation is None else af.truncation}")
    word = "gen" if af.kind == "presented" else "basis"
    for g in af.generators:
        lines.append(f"{word} {g.name} {g.p} {g.q}")
    order = {g.name: i for i, g in enumerate(af.generators)}
    for a in sorted(af.conj, key=order.get):
        lines.append(f"conj {a} = {_poly_text(af.conj[a])}")
    for mon in af.relations:
        lines.append(f"rel {_poly_text(((ONE, mon),))} = 0")
    for (a, b) in sorted(af.products, key=lambda k: (order[k[0]], order[k[1]])):
        lines.append(f"prod {a} {b} = {_poly_text(af.products[(a, b)])}")
    for label, table in (("del", af.del_), ("dbar", af.dbar)):
        for g in sorted(table, key=order.get):
            lines.append(f"{label} {g} = {_poly_text(table[g])}")
    if af.metric:
        lines.append(f"metric {af.metric}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# map files

@dataclass(frozen=True)
class MapFile:
    source: str
    target: str
    images: dict  # generator name -> Poly


def parse_map(text: str) -> MapFile:
    source = target = ""
    images = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        parts = line.split(None, 1)
        key, rest = parts[0], (parts[1] if len(parts) > 1 else "")
        col = line.find(rest) if rest else len(line)
        if key == "source":
            source = rest.strip()
        elif key == "target":
            target = rest.strip()
        elif key == "map":
            if "=" not in rest:
                raise ParseError("expected 'map <gen> = <poly>'", ln, col + 1)
            lhs, rhs = rest.split("=", 1)
            g = lhs.strip()
            if g in images:
                raise ParseError(f"duplicate image for {g!r}", ln, col + 1)
            images[g] = parse_poly(rhs, ln, col + len(lhs) + 1) if rhs.strip() != "0" else ()
        else:
            raise ParseError(f"unknown key {key!r}", ln, 1)
    if not images:
        raise ParseError("no 'map' lines")
    return MapFile(source, target, images)


def parse_class_expr(text: str) -> Poly:
    """A cocycle in brackets, e.g. ``[x*ybar]``; the brackets are optional."""
    s = text.strip()
    if s.startswith("[") and s.endswith("]"):
        s = s[1:-1]
    if s.strip() == "0":
        return ()
    return parse_poly(s)
