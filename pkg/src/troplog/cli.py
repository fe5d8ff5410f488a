"""troplog: JSON-in/JSON-out command line front end.

Every command prints a result envelope {"status", "payload", "timing_ms"};
payloads are deterministic (sorted keys, reduced 'p/q' rationals) so
identical inputs produce byte-identical payloads.  Exit codes: 0 ok,
2 parse error, 3 nonzero slope sum, 4 unstable range, 5 fan problem,
6 missing edge/leg or length mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import errors
from .affine import AffineExpr
from .moduli import (
    build_map_moduli,
    build_moduli_complex,
    classify_self_map,
    product_decomposition,
)
from .plfunction import (
    ContactOrder,
    extend_from_leg_slopes,
    multidegree,
    plfunction_from_json,
    plfunction_to_json,
)
from .subdivision import Fan, subdivide_map_moduli, validate_fan
from .tree import tree_from_json, validate_tree

EXIT_CODES = {
    "ok": 0,
    errors.ParseError.code: 2,
    errors.NonZeroSum.code: 3,
    errors.UnstableRange.code: 4,
    errors.IncompleteFan.code: 5,
    errors.UnsupportedDimension.code: 5,
    errors.NoSuchEdge.code: 6,
    errors.NoSuchLeg.code: 6,
    errors.LengthMismatch.code: 6,
}


def _read_json(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise errors.ParseError(f"cannot read JSON from {path!r}: {exc}") from exc


def _sigma(text: str) -> ContactOrder:
    try:
        return ContactOrder.of(int(x) for x in text.split(","))
    except ValueError as exc:
        raise errors.ParseError(f"bad contact order {text!r}: {exc}") from exc


def cmd_validate(args) -> dict:
    doc = _read_json(args.tree)
    return validate_tree(tree_from_json(doc)).to_json()


def cmd_extend(args) -> dict:
    t = tree_from_json(_read_json(args.tree))
    sigma = _sigma(args.sigma)
    base_value = AffineExpr.parse(args.base_value)
    basepoint = args.basepoint
    if basepoint is not None and basepoint not in t.vertices:
        # JSON vertex ids may be ints; retry the numeric reading.
        try:
            if int(basepoint) in t.vertices:
                basepoint = int(basepoint)
        except ValueError:
            pass
    f = extend_from_leg_slopes(t, sigma, basepoint, base_value)
    return plfunction_to_json(f)


def cmd_multidegree(args) -> dict:
    f = plfunction_from_json(_read_json(args.plf))
    md = multidegree(f)
    return {
        "degrees": {str(v): d for v, d in md.degrees},
        "total": md.total,
        "balanced": md.is_zero,
    }


def cmd_moduli(args) -> dict:
    if args.sigma is None:
        cx = build_moduli_complex(args.n)
    else:
        cx = build_map_moduli(args.n, _sigma(args.sigma))
    payload = {"complex": cx.to_json(), "empty": cx.is_empty}
    if args.certify_product is not None:
        if args.sigma is None:
            raise errors.ParseError("--certify-product requires --sigma")
        report = product_decomposition(args.n, _sigma(args.sigma), args.certify_product)
        payload["product_decomposition"] = report.to_json()
    if args.subdivide is not None:
        if args.sigma is None:
            raise errors.ParseError("--subdivide requires --sigma")
        fan = Fan.from_json(_read_json(args.subdivide))
        sub = subdivide_map_moduli(args.n, _sigma(args.sigma), fan)
        payload["subdivision"] = sub.to_json()
    return payload


def cmd_subdivide(args) -> dict:
    fan = Fan.from_json(_read_json(args.fan))
    report = validate_fan(fan)
    if not report.ok:
        raise errors.IncompleteFan("; ".join(report.problems))
    sigmas = [_sigma(s) for s in args.sigma.split(";")]
    sub = subdivide_map_moduli(args.n, sigmas if len(sigmas) > 1 else sigmas[0], fan)
    return sub.to_json()


def cmd_validate_fan(args) -> dict:
    fan = Fan.from_json(_read_json(args.fan))
    return validate_fan(fan).to_json()


def cmd_selfmap(args) -> dict:
    nf = classify_self_map(args.r, args.a)
    if args.compose:
        r2, a2 = args.compose
        nf = nf.compose(classify_self_map(int(r2), a2))
    return nf.to_json()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="troplog", description=__doc__)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    p.add_argument("--jobs", type=int, default=1, help="worker hint (single process)")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("validate", help="validate a tree JSON file")
    q.add_argument("tree", help="tree JSON file, or - for stdin")
    q.set_defaults(fn=cmd_validate)

    q = sub.add_parser("extend", help="unique balanced function from leg slopes")
    q.add_argument("tree")
    q.add_argument("--sigma", required=True, help="comma-separated integer leg slopes")
    q.add_argument("--basepoint", default=None)
    q.add_argument("--base-value", default="0", help="rational or affine, e.g. 0, 3/2, c")
    q.set_defaults(fn=cmd_extend)

    q = sub.add_parser("multidegree", help="per-vertex degrees of a PL function")
    q.add_argument("plf", help="PL function JSON file, or - for stdin")
    q.set_defaults(fn=cmd_multidegree)

    q = sub.add_parser("moduli", help="moduli cone complex (curves, or maps with --sigma)")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--sigma", default=None)
    q.add_argument("--subdivide", default=None, metavar="FAN_JSON")
    q.add_argument("--certify-product", type=int, default=None, metavar="LEG")
    q.set_defaults(fn=cmd_moduli)

    q = sub.add_parser("subdivide", help="fan-pullback subdivision of map moduli")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--sigma", required=True, help="contact orders; ';' separates target coordinates")
    q.add_argument("--fan", required=True)
    q.set_defaults(fn=cmd_subdivide)

    q = sub.add_parser("validate-fan", help="fan well-formedness and completeness report")
    q.add_argument("fan")
    q.set_defaults(fn=cmd_validate_fan)

    q = sub.add_parser("selfmap", help="normal form of a log-torus self-map")
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--a", default="0")
    q.add_argument("--compose", nargs=2, metavar=("R2", "A2"), default=None)
    q.set_defaults(fn=cmd_selfmap)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.monotonic()
    try:
        payload = args.fn(args)
        status = "ok"
    except errors.TroplogError as exc:
        payload = {"error": exc.code, "message": str(exc)}
        status = exc.code
    elapsed = int((time.monotonic() - start) * 1000)
    envelope = {"status": status, "payload": payload, "timing_ms": elapsed}
    json.dump(envelope, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_CODES.get(status, 1)


if __name__ == "__main__":
    sys.exit(main())
