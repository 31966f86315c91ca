"""Command-line driver.

Every command prints a human-readable summary, or with ``--json`` a report
with a fixed field order::

    schema, command, arguments, inputs (name -> sha256), window, seed, result

Exit codes: 0 when a result was computed (whatever the verdict), 1 on input
errors, 2 when a resource guard refused the computation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Mapping, Sequence

from . import corpus
from .bicomplex import (
    THEORIES, cohomology, cohomology_dims, decomposition_dims, direct_cohomology_dims,
    normalize_theory, schweitzer, schweitzer_components, validate, zigzag_decompose,
)
from .cbba import CBBA, CbbaMorphism, Element, build, check_morphism, is_weak_equivalence
from .errors import BBAError, ResourceGuard
from .formats import parse_map

SCHEMA = 1


# ---------------------------------------------------------------------------
# inputs

class _Inputs:
    """Loads files (paths or bundled names) and records their hashes."""

    def __init__(self):
        self.hashes: dict[str, str] = {}

    def read(self, arg: str, base: Path | None = None) -> tuple[str, Path]:
        p = Path(arg)
        cands = [p]
        if base is not None and not p.is_absolute():
            cands += [base / arg] + [base / (arg + ext) for ext in (".alg", ".cx", ".map")]
        cands.append(corpus.path(arg))
        for c in cands:
            if c.is_file():
                data = c.read_bytes()
                self.hashes[arg] = hashlib.sha256(data).hexdigest()
                try:
                    return data.decode("utf-8"), c
                except UnicodeDecodeError:
                    raise BBAError(f"{arg}: not UTF-8 text") from None
        raise BBAError(f"no such file or bundled example: {arg}")

    def algebra(self, arg: str, base: Path | None = None) -> CBBA:
        text, _ = self.read(arg, base)
        return build(text)

    def json_table(self, arg: str) -> dict:
        text, _ = self.read(arg)
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise BBAError(f"{arg}: invalid JSON ({e.msg} at line {e.lineno})") from None
        if not isinstance(raw, dict):
            raise BBAError(f"{arg}: expected an object mapping \"p,q\" to dimensions")
        out = {}
        for k, v in raw.items():
            try:
                bd = _bidegree(k)
            except argparse.ArgumentTypeError as e:
                raise BBAError(f"{arg}: {e}") from None
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise BBAError(f"{arg}: dimension at {k} must be a non-negative integer")
            out[bd] = v
        return out


def _bidegree(text: str) -> tuple[int, int]:
    try:
        p, q = (int(s) for s in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bidegree {text!r}; expected p,q") from None
    return p, q


DEFAULT_MAX_DEGREE = 6


def _bound(A: CBBA, args) -> int | None:
    """Truncation bound: finite algebras are realized in full unless asked otherwise."""
    if args.max_degree is not None:
        return args.max_degree
    return None if A.top_degree is not None else DEFAULT_MAX_DEGREE


def _realize(A: CBBA, args):
    return A.realize(_bound(A, args))


# ---------------------------------------------------------------------------
# serialization helpers

def _bd_key(bd) -> str:
    if isinstance(bd, tuple):
        return ",".join(str(x) for x in bd)
    return str(bd)


def _table(d: Mapping) -> dict:
    return {_bd_key(k): int(v) for k, v in sorted(d.items())}


def _key_text(A: CBBA, key) -> str:
    try:
        return A.key_text(key)
    except Exception:
        return str(key)


def _system(sys_: Mapping[str, Element]) -> dict:
    return {k: str(v) for k, v in sorted(sys_.items())}


def _functional(A: CBBA, w: Mapping) -> dict:
    return {_key_text(A, k): str(c) for k, c in sorted(w.items(), key=lambda kv: _key_text(A, kv[0]))}


def _certificate(res) -> dict | None:
    from .massey import NonvanishingCertificate, VanishingCertificate

    A = res.algebra
    c = res.certificate
    if isinstance(c, VanishingCertificate):
        return {"type": "vanishing", "system": _system(c.system)}
    if isinstance(c, NonvanishingCertificate):
        return {
            "type": "nonvanishing",
            "functional": _functional(A, c.functional),
            "multipliers": {m: _functional(A, v) for m, v in sorted(c.multipliers.items())},
        }
    return None


def _window_of(D) -> int | None:
    return D.window


# ---------------------------------------------------------------------------
# commands; each returns (result dict, window, seed, human text)

def cmd_check(args, io: _Inputs):
    text, path = io.read(args.file)
    if path.suffix == ".map":
        mf = parse_map(text)
        S = io.algebra(mf.source, path.parent)
        T = io.algebra(mf.target, path.parent)
        mv = check_morphism(CbbaMorphism.from_polys(S, T, mf.images))
        res = {"kind": "map", "source": mf.source, "target": mf.target,
               "ok": mv.ok, "issues": list(mv.issues)}
        human = f"map {mf.source} -> {mf.target}: {'ok' if mv.ok else 'FAILED'}"
        human += "".join(f"\n  {i}" for i in mv.issues)
        return res, None, None, human, mv.ok
    A = build(text)
    R = _realize(A, args)
    rep = validate(R.complex)
    issues = [str(i) for i in rep.issues]
    dims = {bd: R.dim(*bd) for bd in R.complex.support}
    res = {"kind": "algebra", "name": A.name, "ok": not issues, "issues": issues,
           "top_degree": A.top_degree, "dimensions": _table(dims)}
    human = f"{A.name or args.file}: {'ok' if not issues else 'FAILED'}; total dimension {sum(dims.values())}"
    human += "".join(f"\n  {i}" for i in issues)
    return res, _window_of(R.complex), None, human, not issues


def _element_rows(R, group) -> list[str]:
    out = []
    for cl in group.classes():
        parts = group.split(cl.representative)
        e = R.algebra.zero()
        for bd, v in parts.items():
            e = e + R.element(bd, v)
        out.append(str(e))
    return out


def cmd_cohomology(args, io: _Inputs):
    A = io.algebra(args.file)
    th = normalize_theory(args.theory)
    if th == "schweitzer":
        raise BBAError("use the schweitzer command for Schweitzer cohomology")
    R = _realize(A, args)
    D = R.complex
    res = {"theory": th}
    if args.bidegree is None:
        dims = {k: v for k, v in cohomology_dims(D, th).items()
                if v and (D.window is None or sum(k if isinstance(k, tuple) else (k,)) <= D.window)}
        res["dimensions"] = _table(dims)
        lines = [f"{th} cohomology of {A.name or args.file}"]
        lines += [f"  {_bd_key(k)}: {v}" for k, v in sorted(dims.items())]
    else:
        p, q = args.bidegree
        G = cohomology(D, th, p + q if th == "deRham" else p, q)
        classes = _element_rows(R, G)
        res["bidegree"] = _bd_key((p + q,) if th == "deRham" else (p, q))
        res["dimension"] = G.dim
        res["classes"] = classes
        lines = [f"{th} cohomology at {res['bidegree']}: dimension {G.dim}"] + [f"  [{c}]" for c in classes]
    return res, _window_of(D), None, "\n".join(lines), True


def cmd_decompose(args, io: _Inputs):
    A = io.algebra(args.file)
    R = _realize(A, args)
    Z = zigzag_decompose(R.complex)
    shapes = [{"shape": s.describe(), "kind": s.kind, "multiplicity": m} for s, m in Z.items()]
    direct = direct_cohomology_dims(R.complex)
    recon = decomposition_dims(Z)
    agree = {th: recon[th] == direct[th] for th in direct}
    res = {"shapes": shapes, "squares_and_dots_only": Z.only_squares_and_dots(),
           "reconstruction_matches": agree}
    lines = [f"zigzag decomposition of {A.name or args.file}"]
    lines += [f"  {m} x {s['shape']}" for s, m in zip(shapes, (s["multiplicity"] for s in shapes))]
    lines.append("  reconstruction " + ("matches direct computation" if all(agree.values()) else "MISMATCH"))
    return res, _window_of(R.complex), None, "\n".join(lines), True


def cmd_ddbar(args, io: _Inputs):
    from .formality import ddbar_check

    A = io.algebra(args.file)
    R = _realize(A, args)
    v = ddbar_check(R.complex)
    wit = {}
    for bd, vec in sorted(v.witnesses.items()):
        wit[_bd_key(bd)] = str(R.element(bd, vec))
    res = {"holds": v.holds, "failures": [_bd_key(b) for b in v.failures], "witnesses": wit}
    human = f"ddbar-lemma {'holds' if v.holds else 'fails'}"
    human += "".join(f"\n  fails at {k}: {w}" for k, w in wit.items())
    return res, v.window, None, human, True


def cmd_schweitzer(args, io: _Inputs):
    if args.bidegree is None:
        raise BBAError("schweitzer needs --bidegree p,q")
    A = io.algebra(args.file)
    R = _realize(A, args)
    D = R.complex
    p, q = args.bidegree
    top = max((a + b for a, b in D.support), default=0)
    lo, hi = -(p + q), top - (p + q) + 2
    view = schweitzer(D, p, q, lo - 1, hi + 1)
    dims = {}
    for i in range(lo, hi + 1):
        if schweitzer_components(D, p, q, i):
            G = view.cohomology(i)
            if G.dim:
                dims[i] = G.dim
    res = {"center": _bd_key((p, q)), "dimensions": {str(i): d for i, d in sorted(dims.items())}}
    lines = [f"Schweitzer cohomology at {p},{q}"] + [f"  H^{i}: {d}" for i, d in sorted(dims.items())]
    return res, _window_of(D), None, "\n".join(lines), True


_MASSEY_KINDS = {"abc": "abc3", "bc": "abc3", "dolbeault": "dolbeault3",
                 "column": "dolbeault3", "derham": "derham3", "total": "derham3"}


def _massey_result(res, args):
    from .verify import verify

    out = {
        "kind": res.kind,
        "inputs": list(res.inputs),
        "verdict": res.verdict,
        "representative": str(res.representative),
        "normal_form": str(res.normal_form),
        "class_normal_form": str(res.class_normal_form),
        "indeterminacy_dim": res.indeterminacy_dim,
        "ambient_dim": res.ambient_dim,
        "defining_system": _system(res.defining_system),
        "certificate": _certificate(res),
    }
    if res.alt_representative is not None:
        out["alt_representative"] = str(res.alt_representative)
    ok = True
    if args.verify:
        vr = verify(res)
        out["verification"] = {"ok": vr.ok,
                               "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in vr.checks]}
        ok = vr.ok
    lines = [f"<{', '.join(res.inputs)}> ({res.kind}): {res.verdict}",
             f"  representative: {res.representative}",
             f"  indeterminacy: dimension {res.indeterminacy_dim} of {res.ambient_dim}"]
    if args.verify:
        lines.append("  verification: " + ("passed" if ok else "FAILED"))
        lines += [f"    failed: {c.name} {c.detail}" for c in vr.failures()]
    return out, "\n".join(lines), ok


def cmd_massey3(args, io: _Inputs):
    from .massey import triple

    kind = _MASSEY_KINDS.get(args.theory.lower() if args.theory else "abc")
    if kind is None:
        raise BBAError(f"unknown triple product kind {args.theory!r}; expected abc, dolbeault or derham")
    A = io.algebra(args.file)
    ins = [A.parse_class(s) for s in args.classes]
    res = triple(kind, A, *ins, N=args.max_degree, labels=args.classes)
    out, human, ok = _massey_result(res, args)
    return out, res.bound, None, human, ok


def cmd_massey4(args, io: _Inputs):
    from .massey import quadruple_abc

    A = io.algebra(args.file)
    ins = [A.parse_class(s) for s in args.classes]
    seed = 0 if args.seed is None else args.seed
    res = quadruple_abc(A, *ins, N=args.max_degree, seed=seed, labels=args.classes)
    out, human, ok = _massey_result(res, args)
    return out, res.bound, seed, human, ok


def cmd_emss(args, io: _Inputs):
    from .emss import FunctorChoice, apply_functor, pages, simplicial_bicomplex, ss_massey

    A = io.algebra(args.file)
    S = FunctorChoice.parse(args.functor)
    if args.classes:
        ins = [A.parse_class(s) for s in args.classes]
        if args.simplex is not None and args.simplex != len(ins) - 2:
            raise BBAError(f"an {len(ins)}-fold product lives on the simplex of dimension {len(ins) - 2}")
        r = ss_massey(A, ins, S, N=args.max_degree)
        ind = r.indeterminacy
        res = {"functor": str(S), "n_fold": r.n_fold, "degree": r.degree,
               "representative": str(r.representative), "vanishes": r.vanishes,
               "indeterminacy_dim": r.indeterminacy_dim,
               "indeterminacy": [str(_from_keys(A, r.keys, v)) for v in ind.sparse_basis()]}
        human = (f"d_{r.n_fold - 1} of {' (x) '.join(args.classes)} under {S}: {r.representative}"
                 f"\n  {'vanishes' if r.vanishes else 'nonzero'} modulo indeterminacy of dimension {r.indeterminacy_dim}")
        return res, args.max_degree, None, human, True
    n = 1 if args.simplex is None else args.simplex
    r_max = 2 if args.pages is None else args.pages
    N = _bound(A, args)
    C = simplicial_bicomplex(A, n, N)
    F = apply_functor(C, S)
    SS = pages(F, r_max)
    top = (N if N is not None else A.top_degree) * (n + 2)
    n_range = range(min(0, -2 * n - 2), top + 2)
    tables = {str(r): _table(SS.dims(r, n_range)) for r in range(1, r_max + 1)}
    res = {"functor": str(S), "simplex": n, "pages": tables}
    lines = [f"EM spectral sequence of {A.name or args.file} over the {n}-simplex, functor {S}"]
    for r, t in tables.items():
        lines.append(f"  E_{r}: " + ", ".join(f"({k}): {v}" for k, v in t.items()))
    return res, N, None, "\n".join(lines), True


def _from_keys(A: CBBA, keys: Sequence, v: Mapping) -> Element:
    e = A.zero()
    for i, c in v.items():
        e = e + A.basis_element(keys[i]).scale(c)
    return e


def cmd_weak_equiv(args, io: _Inputs):
    text, path = io.read(args.file)
    mf = parse_map(text)
    S = io.algebra(mf.source, path.parent)
    T = io.algebra(mf.target, path.parent)
    f = CbbaMorphism.from_polys(S, T, mf.images)
    v = is_weak_equivalence(f, args.max_degree)
    witnesses = []
    if v.e1 is not None:
        w = v.e1.witness
        if w is not None:
            witnesses.append({"bidegree": _bd_key(w.bidegree), "theory": w.theory, "kind": w.kind})
    res = {"source": mf.source, "target": mf.target, "is_weak_equivalence": v.is_weak_equivalence,
           "morphism_issues": list(v.morphism.issues), "range": v.range_label, "witnesses": witnesses}
    human = f"{mf.source} -> {mf.target}: {'weak equivalence' if v else 'not a weak equivalence'}"
    if v:
        human += f" ({v.range_label})"
    human += "".join(f"\n  {i}" for i in v.morphism.issues)
    human += "".join(f"\n  {w['theory']} {w['kind']} at {w['bidegree']}" for w in witnesses)
    return res, v.window, None, human, True


def cmd_harmonic(args, io: _Inputs):
    from .formality import harmonic, harmonic_consistency

    A = io.algebra(args.file)
    H = harmonic(_realize(A, args))
    issues = harmonic_consistency(H)
    D = H.complex
    res = {"BC": _table({k: v for k, v in H.dims("BC").items() if v and D.in_window(*k)}),
           "A": _table({k: v for k, v in H.dims("A").items() if v and D.in_window(*k)}),
           "consistent": not issues, "issues": issues}
    lines = [f"harmonic spaces of {A.name or args.file}",
             "  BC: " + ", ".join(f"({k}): {v}" for k, v in res["BC"].items()),
             "  A:  " + ", ".join(f"({k}): {v}" for k, v in res["A"].items())]
    if args.bidegree is not None:
        bd = tuple(args.bidegree)
        res["elements"] = {w: [str(e) for e in H.elements(w, bd)] for w in ("BC", "A")}
        for w in ("BC", "A"):
            lines.append(f"  {w} at {_bd_key(bd)}: " + ", ".join(res["elements"][w]))
    lines.append("  dimensions agree with cohomology" if not issues else "  INCONSISTENT: " + "; ".join(issues))
    return res, H.complex.window, None, "\n".join(lines), True


def cmd_geoformal(args, io: _Inputs):
    from .formality import abc_geometric_check

    A = io.algebra(args.file)
    v = abc_geometric_check(A, N=args.max_degree, all_witnesses=True)
    wit = [{"kind": w.kind, "inputs": list(w.inputs), "result": w.result, "bidegree": _bd_key(w.bidegree)}
           for w in v.witnesses]
    res = {"holds": v.holds, "witnesses": wit, "unchecked": [_bd_key(b) for b in v.unchecked]}
    human = f"ABC-geometric formality {'holds' if v.holds else 'fails'}"
    for w in wit:
        human += f"\n  {w['kind']}({', '.join(w['inputs'])}) = {w['result']} is not harmonic at {w['bidegree']}"
    return res, args.max_degree, None, human, True


def cmd_blowup(args, io: _Inputs):
    from .formality import blowup_bc_dims, total

    if args.codim is None or args.x_dims is None or args.z_dims is None:
        raise BBAError("blowup needs --codim, --x-dims and --z-dims")
    X = io.json_table(args.x_dims)
    Z = io.json_table(args.z_dims)
    out = blowup_bc_dims(X, Z, args.codim)
    res = {"codim": args.codim, "dimensions": _table(out), "total": total(out)}
    lines = ["Bott-Chern dimensions of the blow-up"] + [f"  {k}: {v}" for k, v in res["dimensions"].items()]
    return res, None, None, "\n".join(lines), True


COMMANDS = {
    "check": cmd_check,
    "cohomology": cmd_cohomology,
    "decompose": cmd_decompose,
    "ddbar": cmd_ddbar,
    "schweitzer": cmd_schweitzer,
    "massey3": cmd_massey3,
    "massey4": cmd_massey4,
    "emss": cmd_emss,
    "weak-equiv": cmd_weak_equiv,
    "harmonic": cmd_harmonic,
    "geoformal": cmd_geoformal,
    "blowup": cmd_blowup,
}


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a machine-readable report")
    common.add_argument("--max-degree", type=int, metavar="N", help="truncation bound for infinite algebras")

    ap = argparse.ArgumentParser(prog="bba", description="Bigraded cohomology, Massey products and formality checks.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_, file=True):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        if file:
            p.add_argument("file", help="algebra, complex or map file (or a bundled example name)")
        return p

    add("check", "parse and validate a file")
    p = add("cohomology", "cohomology dimension table or classes in one bidegree")
    p.add_argument("--theory", default="BC", help=f"one of {', '.join(THEORIES)}")
    p.add_argument("--bidegree", type=_bidegree, metavar="p,q")
    add("decompose", "zigzag decomposition and dimension reconstruction")
    add("ddbar", "check the ddbar-lemma in every bidegree")
    p = add("schweitzer", "cohomology of the Schweitzer complex")
    p.add_argument("--bidegree", type=_bidegree, metavar="p,q")
    p = add("massey3", "triple Massey product")
    p.add_argument("classes", nargs=3, metavar="CLASS")
    p.add_argument("--theory", default="abc", help="abc, dolbeault or derham")
    p.add_argument("--verify", action="store_true", help="re-check the certificate by substitution")
    p = add("massey4", "quadruple ABC-Massey product")
    p.add_argument("classes", nargs=4, metavar="CLASS")
    p.add_argument("--seed", type=int, metavar="S")
    p.add_argument("--verify", action="store_true", help="re-check the certificate by substitution")
    p = add("emss", "Eilenberg-Moore spectral sequence pages or Massey products")
    p.add_argument("classes", nargs="*", metavar="CLASS")
    p.add_argument("--simplex", type=int, metavar="n")
    p.add_argument("--functor", default="total", help="total, column or schweitzer:p,q")
    p.add_argument("--pages", type=int, metavar="r")
    add("weak-equiv", "check whether a map is a weak equivalence")
    p = add("harmonic", "harmonic Bott-Chern and Aeppli spaces")
    p.add_argument("--bidegree", type=_bidegree, metavar="p,q")
    add("geoformal", "ABC-geometric formality check")
    p = add("blowup", "Bott-Chern dimensions of a blow-up", file=False)
    p.add_argument("--codim", type=int, metavar="k")
    p.add_argument("--x-dims", metavar="FILE", help="JSON object mapping \"p,q\" to dimensions")
    p.add_argument("--z-dims", metavar="FILE", help="JSON object mapping \"p,q\" to dimensions")
    return ap


def _arguments(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("command", "json"):
            continue
        if isinstance(v, tuple):
            v = _bd_key(v)
        out[k] = v
    return out


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    io = _Inputs()
    try:
        result, window, seed, human, ok = COMMANDS[args.command](args, io)
    except ResourceGuard as e:
        print(f"bba: refused: {e}", file=sys.stderr)
        return 2
    except BBAError as e:
        print(f"bba: error: {e}", file=sys.stderr)
        return 1
    if args.json:
        report = {
            "schema": SCHEMA,
            "command": args.command,
            "arguments": _arguments(args),
            "inputs": dict(sorted(io.hashes.items())),
            "window": window,
            "seed": seed,
            "result": result,
        }
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        print(human)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
