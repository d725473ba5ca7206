"""Command-line interface: ``motstem pi | sweep | chart | verify | dump``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from sympy import isprime

from .abgrp import GroupExpr
from .errors import MotStemError, ParseError
from .fieldcat import Finite, parse_field
from .fracture import FourTermReport, fracture_assemble, fracture_caveats
from .manss import (GroupResult, SesResult, apply_differential_rules, assemble_e2_column,
                    pi_one_l_complete)
from .render import render_ascii, render_svg
from .ssinput import CURATED_MAX_STEM, dataset_json
from .verify import SUITES, run_suite

MAX_SWEEP_WIDTH = 200


def parse_range(text: str) -> tuple[int, int]:
    """``"-6..6"`` to ``(-6, 6)``; a single integer is a one-point range."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise ParseError("expected a range like -6..6", text, 0) from None
    if b < a:
        raise ParseError("empty range", text, len(lo))
    if b - a > MAX_SWEEP_WIDTH:
        raise ParseError(f"range wider than {MAX_SWEEP_WIDTH}", text, 0)
    return a, b


def _result_lines(result) -> list[str]:
    lines = [result.render()]
    if isinstance(result, GroupResult) and not result.group.is_zero:
        canon = result.group.simplify().render_canonical()
        if canon != lines[0]:
            lines.append(f"≅ {canon}")
    if isinstance(result, SesResult):
        if result.kernel.is_zero or result.quotient.is_zero:
            lines.append(f"≅ {(result.kernel + result.quotient).render_canonical()}")
        else:
            lines.append(f"kernel: {result.kernel.simplify().render()}")
            lines.append(f"quotient: {result.quotient.simplify().render()}")
        if result.addition_law is not None:
            lines.append(f"addition law: {result.addition_law}")
    return lines


def _prime(value):
    if value is not None and not isprime(value):
        raise ParseError("--prime must be a prime", str(value), 0)
    return value


def cmd_pi(args) -> int:
    f = parse_field(args.field)
    prime = _prime(args.prime)
    if prime is None:
        result = fracture_assemble(f, args.weight)
        notes = fracture_caveats(f, args.weight)
    else:
        result = pi_one_l_complete(f, prime, args.weight)
        notes = []
    if args.json:
        print(json.dumps({"field": f.spec_string(), "weight": args.weight, "prime": prime,
                          "result": result.to_json(), "notes": notes}, ensure_ascii=False))
    else:
        for line in _result_lines(result):
            print(line)
        for n in notes:
            print(f"note: {n}")
    return 0


def _sweep_one(job):
    field_text, w = job
    return w, fracture_assemble(parse_field(field_text), w)


def cmd_sweep(args) -> int:
    f = parse_field(args.field)
    lo, hi = parse_range(args.weights)
    jobs = [(args.field, w) for w in range(lo, hi + 1)]
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    if args.json:
        print(json.dumps({"field": f.spec_string(),
                          "results": [{"weight": w, "result": r.to_json()} for w, r in results]},
                         ensure_ascii=False))
        return 0
    finite = isinstance(f, Finite)
    print(f"π_{{1+nα}}S[1/p] over {f.describe()}")
    for w, r in results:
        if finite:
            g = r.resolved if isinstance(r, FourTermReport) else None
            if g is None and not isinstance(r, FourTermReport):
                g = GroupExpr.sum(r.pieces())
            text = g.render_canonical() if g is not None else r.render()
        else:
            text = r.render().replace("\n", " ")
        print(f"n={w:>3}: {text}")
    return 0


def cmd_chart(args) -> int:
    f = parse_field(args.field)
    prime = _prime(args.prime)
    lo, hi = parse_range(args.stems)
    if lo < 0 or hi > CURATED_MAX_STEM:
        raise MotStemError(f"stems must lie in 0..{CURATED_MAX_STEM}")
    cols = [assemble_e2_column(f, prime, st, args.weight, strict=args.strict)
            for st in range(lo, hi + 1)]
    if args.page == "Einf":
        if not lo <= 1 <= hi:
            raise MotStemError("the E∞ page is only settled for the 1-column")
        get = {c.stem: c for c in cols}
        einf = apply_differential_rules(get[1], get.get(0), get.get(2), f, prime, args.weight)
        cols = [einf]
    if args.json:
        out = json.dumps([c.to_json() for c in cols], ensure_ascii=False, indent=1) + "\n"
    elif args.format == "svg":
        out = render_svg(cols)
    else:
        out = render_ascii(cols)
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return 0


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, Path(args.golden_dir) if args.golden_dir else None)
    if args.json:
        print(json.dumps(rep.to_json(), ensure_ascii=False))
    else:
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {rep.name}: {rep.cases} cases, {len(rep.failures)} failures")
        for failure in rep.failures[:50]:
            print(f"  counterexample: {failure}")
    return 0 if rep.passed else 1


def cmd_dump(args) -> int:
    if args.dataset != "anss":
        raise MotStemError(f"unknown dataset {args.dataset!r}")
    prime = _prime(args.prime) or 2
    print(json.dumps({"prime": prime, "maxStem": CURATED_MAX_STEM,
                      "entries": dataset_json(prime)}, ensure_ascii=False, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="motstem",
                                     description="Stable motivic 1-line calculator")
    parser.add_argument("--config", help="JSON file of default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", default=None)
        return p

    p = common(sub.add_parser("pi", help="one group π_{1+wα}"))
    p.add_argument("--field")
    p.add_argument("--weight", type=int)
    p.add_argument("--prime", type=int, help="l-complete answer at this prime")
    p.set_defaults(func=cmd_pi, required=("field", "weight"))

    p = common(sub.add_parser("sweep", help="integral answers over a weight range"))
    p.add_argument("--field")
    p.add_argument("--weights")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_sweep, required=("field", "weights"))

    p = common(sub.add_parser("chart", help="assembled E2 columns"))
    p.add_argument("--field")
    p.add_argument("--prime", type=int)
    p.add_argument("--stems")
    p.add_argument("--weight", type=int)
    p.add_argument("--page", choices=("E2", "Einf"))
    p.add_argument("--format", choices=("ascii", "svg"))
    p.add_argument("--output")
    p.add_argument("--strict", action="store_true", default=None,
                   help="fail on unknown coefficients instead of annotating them")
    p.set_defaults(func=cmd_chart, required=("field", "prime"),
                   fallbacks={"stems": "0..2", "weight": 0, "page": "E2", "format": "ascii",
                              "strict": False})

    p = common(sub.add_parser("verify", help="run a self-check suite"))
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--golden-dir")
    p.set_defaults(func=cmd_verify, required=())

    p = sub.add_parser("dump", help="export a dataset")
    p.add_argument("--dataset", default=None)
    p.add_argument("--prime", type=int)
    p.set_defaults(func=cmd_dump, required=("dataset",))
    return parser


def _apply_config(args, parser):
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config: {exc}", args.config, 0) from None
        if not isinstance(config, dict):
            raise ParseError("config must be a JSON object", args.config, 0)
    for key, value in config.items():
        key = key.replace("-", "_")
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, value)
    for key, value in getattr(args, "fallbacks", {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    if getattr(args, "json", None) is None:
        args.json = False
    missing = [k for k in args.required if getattr(args, k, None) is None]
    if missing:
        parser.error(f"missing required option(s): {', '.join('--' + m for m in missing)}")


_RANGE_FLAGS = ("--weights", "--stems", "--weight")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let ``--weights -6..6`` through argparse, which reads ``-6..6`` as a flag."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _RANGE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        _apply_config(args, parser)
        return args.func(args)
    except MotStemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyError as exc:
        print(f"error: unknown key {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
