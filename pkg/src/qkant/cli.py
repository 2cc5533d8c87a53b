"""Command-line front end.

Exit codes: 0 success, 1 a property check failed, 2 invalid input,
3 the fixpoint iteration did not converge (artifacts are still written).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

from . import propcheck
from .behaviour import CertificateError, behavioural_distance
from .enriched import (VCategory, compose_relations, converse, discrete, kan_extension)
from .extensions import extension_from_string
from .functors import Distribution, Labelled, Maybe, functor_from_string
from .liftings import build_lifting
from .logic import (FormulaSyntaxError, default_modalities, eval_formula, format_formula,
                    logical_distance, parse_formula)
from .quantale import DomainError, UnsupportedEnumeration, get_quantale
from .serialization import (SpecError, _payload, category_from_json, format_value,
                            load_system_file, relation_from_json, relation_to_json)

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NONCONVERGENCE = 0, 1, 2, 3


class InputError(Exception):
    pass


def write_atomic(path: str, text: str):
    """Write via a temporary file in the target directory, then rename."""
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".qkant-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _default_lifting(F) -> str:
    base = F
    while isinstance(base, (Labelled, Maybe)):
        base = base.inner
    if isinstance(base, Distribution):
        return "sym∘kantorovich:E" if isinstance(F, Maybe) or (
            isinstance(F, Labelled) and isinstance(F.inner, Maybe)) else "kantorovich:E"
    if base.name == "nbhd":
        return "kantorovich:nbox"
    if base.name == "id":
        return "id"
    return "kantorovich:dia"


def _lifting_for(spec, override):
    text = override or spec.lifting or _default_lifting(spec.functor)
    try:
        return build_lifting(text, spec.functor, spec.quantale, spec.coalgebra.labels)
    except (ValueError, DomainError) as exc:
        raise InputError(f"lifting: {exc}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse rational {text!r}") from None


def _emit(args, csv_text: str, doc: dict):
    if getattr(args, "csv", None):
        write_atomic(args.csv, csv_text)
    if getattr(args, "json", None):
        write_atomic(args.json, _dump(doc))
    sys.stdout.write(csv_text)


# -- commands --------------------------------------------------------------

def cmd_bd(args) -> int:
    spec = load_system_file(args.spec)
    L = _lifting_for(spec, args.lifting)
    eps = _fraction(args.epsilon)
    try:
        res = behavioural_distance(spec.coalgebra, L, epsilon=eps, max_iter=args.max_iter,
                                   force=args.force)
    except CertificateError as exc:
        raise InputError(str(exc)) from None
    doc = res.to_json()
    doc["lifting"] = L.name
    _emit(args, res.to_csv(), doc)
    if not res.converged:
        print(f"warning: no convergence after {res.iterations} iterations", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def _grid(q, text):
    if text is None:
        return None
    try:
        return tuple(q.parse(t.strip()) for t in text.split(",") if t.strip())
    except (DomainError, ValueError) as exc:
        raise InputError(f"grid: {exc}") from None


def cmd_ld(args) -> int:
    spec = load_system_file(args.spec)
    q = spec.quantale
    names = args.modalities.split(",") if args.modalities else spec.modalities
    registry = default_modalities(spec.functor, q, names)
    c = spec.coalgebra
    if args.formula is not None:
        phi = parse_formula(args.formula, registry)
        vec = eval_formula(phi, c, registry)
        doc = {"formula": format_formula(phi),
               "values": {str(x): format_value(q, v) for x, v in vec.as_dict().items()}}
        lines = ["state,value"] + [f"{x},{_cell(q, v)}" for x, v in vec.as_dict().items()]
        _emit(args, "\n".join(lines) + "\n", doc)
        return EXIT_OK
    res = logical_distance(c, registry, args.depth, _grid(q, args.grid), args.budget)
    doc = res.to_json()
    doc.update({"depth": args.depth, "formulas": res.formulas, "partial": res.partial,
                "grid": [format_value(q, u) for u in res.grid],
                "modalities": sorted(registry)})
    _emit(args, res.to_csv(), doc)
    if res.partial:
        print("warning: formula budget exhausted; result is partial", file=sys.stderr)
    return EXIT_OK


def _cell(q, v) -> str:
    out = format_value(q, v)
    if isinstance(out, bool):
        return "top" if out else "bot"
    return out if isinstance(out, str) else json.dumps(out)


def _infer_functor(lifting: str) -> str:
    if "kantorovich:E" in lifting or "tv" in lifting.split("∘"):
        return "dist"
    if "dia" in lifting or "box" in lifting or "egli" in lifting:
        return "powerset"
    return "id"


def cmd_check(args) -> int:
    seed = int(os.environ.get("QK_SEED", args.seed))
    budget = args.budget
    if args.lifting:
        q = get_quantale(args.quantale)
        F = functor_from_string(args.functor or _infer_functor(args.lifting))
        L = build_lifting(args.lifting, F, q)
        if args.suite not in ("initial", "all"):
            raise InputError("--lifting applies to the initial suite")
        reports = [propcheck.check_preserves_initial(L, q, budget, seed)]
    elif args.extension:
        q = get_quantale(args.quantale)
        E = extension_from_string(args.extension, q)
        reports = []
        if args.suite in ("lax", "all"):
            reports.append(propcheck.check_lax_axioms(E, budget=None if budget else 0))
        if args.suite in ("enriched", "all"):
            reports.append(propcheck.check_enriched(E, None if budget else ()))
        if not reports:
            raise InputError("--extension applies to the lax and enriched suites")
    else:
        reports = propcheck.run_suite(args.suite, seed, budget)
    for r in reports:
        print(r.summary())
        for w in r.failures[:1]:
            print("  witness:", json.dumps(propcheck._jsonable(w), sort_keys=True))
    if sum(r.instances for r in reports) == 0:
        print("note: zero instances checked (trivial run)")
    if args.json:
        write_atomic(args.json, _dump({"seed": seed, "budget": budget,
                                       "reports": [r.to_json() for r in reports]}))
    bad = [r for r in reports if not r.passed and not r.negative_control]
    return EXIT_CHECK if bad else EXIT_OK


def cmd_compare(args) -> int:
    spec = load_system_file(args.spec)
    names = [n.strip() for n in args.liftings.split(",") if n.strip()]
    if len(names) != 2:
        raise InputError("--liftings expects two comma-separated lifting descriptions")
    c = spec.coalgebra
    q = spec.quantale
    X = c.states
    mats = []
    for n in names:
        L = _lifting_for(spec, n)
        if args.mode == "bd":
            mats.append(behavioural_distance(c, L, force=True).matrix)
        else:
            base = spec.metric or discrete(q, X)
            lifted = L.structure(base, c.images())
            mats.append(tuple(tuple(lifted(c.alpha(x), c.alpha(y)) for y in X) for x in X))
    gap = Fraction(0)
    rows = ["x,y," + ",".join(names) + ",gap"]
    for i, x in enumerate(X):
        for j, y in enumerate(X):
            u, v = mats[0][i][j], mats[1][i][j]
            d = abs(q.to_number(u) - q.to_number(v))
            gap = max(gap, d)
            rows.append(f"{x},{y},{_cell(q, u)},{_cell(q, v)},{d}")
    text = "\n".join(rows) + "\n"
    doc = {"liftings": names, "mode": args.mode, "max_gap": str(gap),
           "matrices": [[[format_value(q, v) for v in row] for row in m] for m in mats]}
    _emit(args, text, doc)
    print(f"max gap: {gap}")
    return EXIT_OK


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    except OSError as exc:
        raise SpecError(str(exc)) from None


def cmd_lift(args) -> int:
    c: VCategory = category_from_json(_load_json(args.category))
    q = c.quantale
    F = functor_from_string(args.functor)
    L = build_lifting(args.lifting, F, q)
    els = None
    if args.elements:
        if args.elements.startswith("@"):
            raw = _load_json(args.elements[1:])
        else:
            try:
                raw = json.loads(args.elements)
            except json.JSONDecodeError as exc:
                raise SpecError(f"invalid JSON: {exc.msg}", "elements") from None
        if not isinstance(raw, list):
            raise SpecError("expected a list of elements", "elements")
        els = [_payload(F, q, c.carrier, e, f"elements[{i}]", ()) for i, e in enumerate(raw)]
    res = L.structure(c, els)
    names = [_element_name(e) for e in res.carrier]
    rows = ["," + ",".join(names)]
    for n, row in zip(names, res.matrix):
        rows.append(n + "," + ",".join(_cell(q, v) for v in row))
    text = "\n".join(rows) + "\n"
    doc = {"quantale": q.name, "lifting": L.name, "elements": names,
           "matrix": [[format_value(q, v) for v in row] for row in res.matrix]}
    _emit(args, text, doc)
    return EXIT_OK


def _element_name(e) -> str:
    if e is None:
        return "stop"
    if isinstance(e, frozenset):
        return "{" + " ".join(sorted(_element_name(x) for x in e)) + "}"
    if isinstance(e, tuple):
        return "(" + " ".join(_element_name(x) for x in e) + ")"
    if hasattr(e, "items"):
        return "[" + " ".join(f"{x}:{p}" for x, p in sorted(e.items(), key=lambda t: str(t[0]))) + "]"
    return str(e)


def cmd_rel(args) -> int:
    r = relation_from_json(_load_json(args.first))
    if args.op == "converse":
        out = converse(r)
    else:
        if not args.second:
            raise InputError(f"{args.op} needs two relations")
        s = relation_from_json(_load_json(args.second))
        try:
            out = compose_relations(s, r) if args.op == "compose" else kan_extension(r, s)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    text = _dump(relation_to_json(out))
    if args.json:
        write_atomic(args.json, text)
    sys.stdout.write(text)
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qkant", description="Quantale-valued behavioural distances, "
                                "Kantorovich liftings and their logics on finite systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def outputs(sp):
        sp.add_argument("--csv", help="write the table to this file")
        sp.add_argument("--json", help="write a JSON report to this file")

    sp = sub.add_parser("bd", help="behavioural distance of a system")
    sp.add_argument("spec")
    sp.add_argument("--lifting", help="override the lifting named in the spec")
    sp.add_argument("--epsilon", default="1/1000000")
    sp.add_argument("--max-iter", type=int, default=1000)
    sp.add_argument("--force", action="store_true",
                    help="run even if the lifting is known not to preserve initial morphisms")
    outputs(sp)
    sp.set_defaults(fn=cmd_bd)

    sp = sub.add_parser("ld", help="logical distance, or the value of one formula")
    sp.add_argument("spec")
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--grid", help="comma-separated constants, e.g. 0,1/2,1")
    sp.add_argument("--formula")
    sp.add_argument("--modalities", help="comma-separated modality names")
    sp.add_argument("--budget", type=int, default=400)
    outputs(sp)
    sp.set_defaults(fn=cmd_ld)

    sp = sub.add_parser("check", help="run property checks")
    sp.add_argument("--suite", choices=["lax", "initial", "galois", "enriched", "all"], default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=100)
    sp.add_argument("--lifting", help="check a single lifting (initial suite)")
    sp.add_argument("--extension", help="check a single lax extension (lax/enriched suites)")
    sp.add_argument("--quantale", default="bool2")
    sp.add_argument("--functor")
    sp.add_argument("--json", help="write the reports to this file")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("compare", help="compare two liftings on a system")
    sp.add_argument("spec")
    sp.add_argument("--liftings", required=True)
    sp.add_argument("--mode", choices=["step", "bd"], default="step",
                    help="step: one lifting step along the transitions; bd: full fixpoints")
    outputs(sp)
    sp.set_defaults(fn=cmd_compare)

    sp = sub.add_parser("lift", help="print the lifted structure of a V-category")
    sp.add_argument("category")
    sp.add_argument("--lifting", required=True)
    sp.add_argument("--functor", default="powerset")
    sp.add_argument("--elements", help="JSON list of elements, or @file")
    outputs(sp)
    sp.set_defaults(fn=cmd_lift)

    sp = sub.add_parser("rel", help="relation calculator")
    sp.add_argument("op", choices=["compose", "converse", "residual"])
    sp.add_argument("first")
    sp.add_argument("second", nargs="?")
    sp.add_argument("--json", help="write the result to this file")
    sp.set_defaults(fn=cmd_rel)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FormulaSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, DomainError, UnsupportedEnumeration, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
