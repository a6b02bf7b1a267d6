"""Command-line pipeline with deterministic, scriptable output.

Subcommands: build, localize, tensor, hocolim, simplify, verify, hom,
plumb, ginzburg, equiv, normalize.  All artifacts are JSON (or plain text
via --emit text) with stable field order, so identical inputs give
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import Ring, render_poly
from .analysis import functor_rank_compat, truncated_cohomology
from .constructions import PushoutSpan, hocolim, localize, tensor
from .dgcat import (
    DgFunctor,
    audit_d_squared,
    from_json,
    to_json,
    validate_functor,
)
from .fukaya import ModelId, build
from .plumbing import (
    build_ginzburg,
    build_wrapped,
    edge_flip_witness,
    ginzburg_witness,
    normalize as normalize_data,
    plumbing_from_json,
    plumbing_to_json,
    quiver_from_json,
    sign_gauge_witness,
)
from .reduce import greedy_simplify, replay, strictify_t


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def render_text(cat) -> str:
    lines = [f"coefficients: {cat.ring.render()}",
             "objects: " + ", ".join(cat.objects),
             "generators:"]
    for g in cat.generators:
        lines.append(f"  {g.name}: {g.source} -> {g.target}  deg {g.degree}")
        lines.append(f"    d {g.name} = "
                     f"{render_poly(cat.differentials[g.name])}")
    rules = getattr(cat, "rules", None)
    if rules:
        lines.append("relations:")
        for lhs, rhs in rules:
            lines.append("  " + "*".join(g.name for g in lhs)
                         + " = " + render_poly(rhs))
    return "\n".join(lines) + "\n"


def _emit_cat(cat, args):
    if getattr(args, "emit", "json") == "text":
        _emit(render_text(cat), args.out)
    else:
        _emit(_dump(to_json(cat)), args.out)


def _load_json(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _load_cat(path: str):
    return from_json(_load_json(path))


def functor_from_json(doc: dict, source, target) -> DgFunctor:
    gm = {}
    for g in source.generators:
        text = doc["generators"].get(g.name, "0")
        src = doc["objects"][g.source]
        tgt = doc["objects"][g.target]
        gm[g.name] = target.poly(text, src, tgt)
    return DgFunctor(source, target, dict(doc["objects"]), gm)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_build(args):
    ring = Ring.parse(args.coeff)
    options = json.loads(args.options) if args.options else None
    cat = build(ModelId.parse(args.model), ring, options)
    _emit_cat(cat, args)
    return 0


def cmd_localize(args):
    cat = _load_cat(args.file)
    cat = localize(cat, args.gens.split(","))
    _emit_cat(cat, args)
    return 0


def cmd_tensor(args):
    a = _load_cat(args.a)
    b = _load_cat(args.b)
    _emit_cat(tensor(a, b), args)
    return 0


def cmd_hocolim(args):
    doc = _load_json(args.file)
    a = from_json(doc["a"])
    c = from_json(doc["c"])
    b = from_json(doc["b"])
    alpha = functor_from_json(doc["alpha"], c, a)
    beta = functor_from_json(doc["beta"], c, b)
    cat = hocolim(PushoutSpan(a, c, b, alpha, beta))
    if args.strictify:
        cat = strictify_t(cat)
    _emit_cat(cat, args)
    return 0


def cmd_simplify(args):
    cat = _load_cat(args.file)
    if args.script:
        cat = replay(cat, _load_json(args.script))
    if args.greedy:
        cat, _ = greedy_simplify(cat)
    _emit_cat(cat, args)
    return 0


def cmd_verify(args):
    failures = []
    files = []
    for path in args.paths:
        p = Path(path)
        if p.is_dir():
            files += sorted(p.glob("**/*.json"))
        else:
            files.append(p)
    for path in files:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
            if doc.get("type") == "functor":
                source = from_json(doc["source"])
                target = from_json(doc["target"])
                validate_functor(functor_from_json(doc, source, target))
            else:
                audit_d_squared(from_json(doc))
            sys.stdout.write(f"ok {path}\n")
        except Exception as err:  # audit failures and parse errors alike
            failures.append(path)
            sys.stdout.write(f"FAIL {path}: {err}\n")
    return 1 if failures else 0


def cmd_hom(args):
    cat = _load_cat(args.file)
    lo, hi = (int(x) for x in args.window.split(":"))
    field = Ring.parse(args.field)
    table = truncated_cohomology(cat, args.src, args.tgt, (lo, hi),
                                 args.bound, field)
    if args.emit == "md":
        _emit(table.markdown() + "\n", args.out)
    else:
        _emit(_dump(table.to_json()), args.out)
    return 0


def cmd_plumb(args):
    ring = Ring.parse(args.coeff) if args.coeff else None
    data = plumbing_from_json(_load_json(args.file), ring, args.n)
    placement = None
    if args.reorder:
        raw = _load_json(args.reorder)
        placement = {vid: {"left": [tuple(t) for t in v["left"]],
                           "right": [tuple(t) for t in v["right"]]}
                     for vid, v in raw.items()}
    cat = build_wrapped(data, placement)
    _emit_cat(cat, args)
    return 0


def cmd_ginzburg(args):
    gq = quiver_from_json(_load_json(args.file))
    ring = Ring.parse(args.coeff)
    if args.witness:
        data, functor, report = ginzburg_witness(gq, args.n, ring)
        doc = {
            "equal": report["equal"],
            "mismatches": report["mismatches"],
            "plumbing": plumbing_to_json(data),
            "relabel": {name: render_poly(poly)
                        for name, poly in sorted(functor.generator_map.items())},
        }
        _emit(_dump(doc), args.out)
        return 0 if report["equal"] else 1
    cat = build_ginzburg(gq, args.n, ring)
    _emit_cat(cat, args)
    return 0


def cmd_equiv(args):
    ring = Ring.parse(args.coeff) if args.coeff else None
    data = plumbing_from_json(_load_json(args.file), ring)
    if args.mode == "flip":
        witness = edge_flip_witness(data, args.arrow)
        doc = {
            "mode": "flip",
            "arrow": args.arrow,
            "flipped": plumbing_to_json(witness.flipped),
            "forward_valid": witness.certificates[0]["valid"],
            "backward_valid": witness.certificates[1]["valid"],
        }
    else:
        witness = sign_gauge_witness(data, args.flip_set.split(","))
        doc = {
            "mode": "gauge",
            "flip_set": sorted(args.flip_set.split(",")),
            "regauged": plumbing_to_json(witness.regauged),
            "valid": witness.certificate["valid"],
            "vertex_signs": {k: v for k, v in sorted(
                witness.vertex_signs.items())},
        }
    _emit(_dump(doc), args.out)
    return 0


def cmd_normalize(args):
    data = plumbing_from_json(_load_json(args.file))
    _emit(_dump(plumbing_to_json(normalize_data(data))), args.out)
    return 0


def cmd_functor_check(args):
    doc = _load_json(args.file)
    source = from_json(doc["source"])
    target = from_json(doc["target"])
    functor = functor_from_json(doc, source, target)
    cert = validate_functor(functor)
    if args.ranks:
        lo, hi = (int(x) for x in args.window.split(":"))
        cert = {"functor": cert,
                "ranks": functor_rank_compat(functor, (lo, hi), args.bound,
                                             Ring.parse(args.field))}
    _emit(_dump(cert), args.out)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semifree",
        description="exact engine for semifree dg categories and plumbings")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write to a file instead of stdout")
        p.add_argument("--emit", choices=["json", "text"], default="json")

    p = sub.add_parser("build", help="emit a named model category")
    p.add_argument("--model", required=True,
                   help="A1 | A2 | C:n | S:n,m+[,m-] | M:g,m | D12:n | "
                        "B01:n | D01:n")
    p.add_argument("--coeff", default="Z")
    p.add_argument("--options", help="JSON options, e.g. gradings")
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("localize", help="invert closed degree-0 generators")
    p.add_argument("file")
    p.add_argument("--gens", required=True)
    common(p)
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("tensor", help="tensor product of two presentations")
    p.add_argument("a")
    p.add_argument("b")
    common(p)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("hocolim", help="homotopy colimit of a span file")
    p.add_argument("file")
    p.add_argument("--strictify", action="store_true")
    common(p)
    p.set_defaults(func=cmd_hocolim)

    p = sub.add_parser("simplify", help="replay a reduction script")
    p.add_argument("file")
    p.add_argument("--script")
    p.add_argument("--greedy", action="store_true")
    common(p)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("verify", help="re-audit presentations and functors")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hom", help="truncated cohomology ranks")
    p.add_argument("file")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--window", required=True, help="lo:hi")
    p.add_argument("--bound", type=int, default=8)
    p.add_argument("--field", default="Q")
    p.add_argument("--out")
    p.add_argument("--emit", choices=["json", "md"], default="json")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("plumb", help="plumbing data to presentation")
    p.add_argument("file")
    p.add_argument("--n", type=int)
    p.add_argument("--coeff")
    p.add_argument("--reorder", help="placement JSON for the n=2 products")
    common(p)
    p.set_defaults(func=cmd_plumb)

    p = sub.add_parser("ginzburg", help="Ginzburg category of a graded quiver")
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coeff", default="Z")
    p.add_argument("--witness", action="store_true",
                   help="compare against the sphere plumbing presentation")
    common(p)
    p.set_defaults(func=cmd_ginzburg)

    p = sub.add_parser("equiv", help="equivalence witnesses")
    p.add_argument("mode", choices=["flip", "gauge"])
    p.add_argument("file")
    p.add_argument("--arrow")
    p.add_argument("--flip-set", dest="flip_set")
    p.add_argument("--coeff")
    p.add_argument("--out")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("normalize", help="canonical form of plumbing data")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("functor", help="validate a functor file")
    p.add_argument("file")
    p.add_argument("--ranks", action="store_true")
    p.add_argument("--window", default="-3:1")
    p.add_argument("--bound", type=int, default=8)
    p.add_argument("--field", default="Q")
    p.add_argument("--out")
    p.set_defaults(func=cmd_functor_check)

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except Exception as err:
        sys.stderr.write(f"error: {err}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
