"""amgm-gap command line.

  amgm-gap eval '[1, 9]'
  amgm-gap eval dist.json
  amgm-gap extremal --side hi --v 1 --e 4 --c 0.5
  amgm-gap verify sandwich --trials 100000 --seed 1
  amgm-gap verify prop2 --v 1 --f INF
  amgm-gap sweep --side lo --v 1 --param 1.25,2,4,INF --output lo.csv

Exit status: 0 ok, 1 verification failure, 2 usage or input error,
3 internal consistency violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .bounds import (
    InadmissiblePair,
    SandwichViolation,
    admissible_hi,
    admissible_lo,
    evaluate,
    lower_bound,
    upper_bound,
)
from .core import DistributionError, from_dict, sqrt_moments
from .extremal import ShiftOutOfRange, psi, psi_limit, spec_to_distribution, two_point_hi, two_point_lo
from .verify import (
    CampaignConfig,
    InvalidConfig,
    falsify_sandwich,
    verify_attainment,
    verify_lemma_var,
    verify_prop2,
    verify_prop3,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
SUITES = ("sandwich", "prop2", "prop3", "lemvar", "attain", "all")


class UsageError(Exception):
    pass


def parse_real(text: str) -> float:
    """A float, or ``INF`` (any case) for +infinity."""
    t = text.strip()
    if t.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        x = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(x):
        raise argparse.ArgumentTypeError("NaN is not allowed")
    return x


def parse_list(text: str) -> list[float]:
    return [parse_real(t) for t in text.split(",") if t.strip()]


def _jsonable(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "INF" if obj > 0 else "-INF"
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def emit(obj, out) -> None:
    out.write(json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n")


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "INF" if x > 0 else "-INF"
    return format(x, ".17g")


def load_distribution(source: str):
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith(("[", "{")):
        text = source
    else:
        path = Path(source)
        if not path.is_file():
            raise UsageError(f"file not found: {source}")
        text = path.read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from None
    return from_dict(obj)


def cmd_eval(args, out) -> int:
    d = load_distribution(args.input)
    summary, bounds = evaluate(d)
    emit({"distribution": d.to_dict(), **summary.to_dict(), **bounds.to_dict()}, out)
    return EXIT_OK


def cmd_extremal(args, out) -> int:
    if args.side == "hi":
        if args.e is None:
            raise UsageError("--side hi needs --e")
        spec = two_point_hi(args.v, args.e, args.u)
        bound, kind = upper_bound(args.v, args.e), "upper"
    else:
        if args.f is None:
            raise UsageError("--side lo needs --f")
        spec = two_point_lo(args.v, args.f, args.u)
        bound, kind = lower_bound(args.v, args.f), "lower"
    d = spec_to_distribution(spec, args.c)
    emit(
        {
            "side": args.side,
            "spec": spec.to_dict(),
            "c": args.c,
            "distribution": d.to_dict(),
            "summary": sqrt_moments(d).to_dict(),
            "psi": psi(spec, args.c),
            "psi_limit": psi_limit(spec),
            "bound": bound,
            "bound_kind": kind,
        },
        out,
    )
    return EXIT_OK


def _config(args) -> CampaignConfig:
    return CampaignConfig(
        trials=args.trials,
        max_atoms=args.max_atoms,
        value_cap=args.value_cap,
        zero_atom_prob=args.zero_atom_prob,
        seed=args.seed if args.seed is not None else 0,
    )


def _attain_cases(args) -> list[tuple[float, float, str]]:
    if args.side is None and args.e is None and args.f is None:
        return [(args.v or 1.0, 4.0 * (args.v or 1.0), "hi"), (args.v or 1.0, 2.0 * (args.v or 1.0), "lo")]
    side = args.side or ("hi" if args.e is not None else "lo")
    param = args.e if side == "hi" else args.f
    if param is None or args.v is None:
        raise UsageError(f"attain --side {side} needs --v and --{'e' if side == 'hi' else 'f'}")
    return [(args.v, param, side)]


def cmd_verify(args, out) -> int:
    if args.ci and args.seed is None:
        raise UsageError("--ci requires an explicit --seed")
    cfg = _config(args)
    suites = ["sandwich", "prop2", "prop3", "lemvar", "attain"] if args.suite == "all" else [args.suite]
    reports = []
    for suite in suites:
        if suite == "sandwich":
            reports.append(falsify_sandwich(cfg, workers=args.workers))
        elif suite == "lemvar":
            reports.append(verify_lemma_var(cfg, workers=args.workers))
        elif suite == "prop3":
            reports.append(verify_prop3(cfg, workers=args.workers))
        elif suite == "prop2":
            pairs = [(args.v, args.f)] if args.f is not None else [(args.v or 1.0, 2.0), (args.v or 1.0, math.inf)]
            for V, F in pairs:
                if V is None:
                    raise UsageError("prop2 needs --v")
                reports.append(verify_prop2(V, F, cfg))
        elif suite == "attain":
            for V, param, side in _attain_cases(args):
                reports.append(verify_attainment(V, param, side, args.grid))
    failures = sum(r.failures for r in reports)
    emit({"failures": failures, "reports": [r.to_dict() for r in reports]}, out)
    return EXIT_OK if failures == 0 else EXIT_FAIL


def sweep_rows(side: str, v_values, params) -> list[dict]:
    rows = []
    for V in v_values:
        for x in params:
            ok = admissible_hi(V, x) if side == "hi" else admissible_lo(V, x)
            bound = (upper_bound(V, x) if side == "hi" else lower_bound(V, x)) if ok else None
            rows.append({"v": V, "param": x, "bound": bound, "skipped": not ok})
    return rows


def monotonicity_violations(side: str, rows: list[dict]) -> list[str]:
    """Upper bound nondecreasing in V and E; lower nondecreasing in V, nonincreasing in F."""
    live = [r for r in rows if not r["skipped"]]
    bad = []
    sign = 1.0 if side == "hi" else -1.0
    for key, other, s in (("v", "param", sign), ("param", "v", 1.0)):
        groups: dict[float, list[dict]] = {}
        for r in live:
            groups.setdefault(r[key], []).append(r)
        for g in groups.values():
            g = sorted(g, key=lambda r: r[other])
            for a, b in zip(g, g[1:]):
                if a[other] < b[other] and s * (b["bound"] - a["bound"]) < 0:
                    bad.append(f"bound not monotone in {other}: {a} -> {b}")
    return bad


def cmd_sweep(args, out) -> int:
    params = args.param if args.param is not None else (args.e if args.side == "hi" else args.f)
    if params is None:
        raise UsageError("sweep needs --param (or --e/--f)")
    rows = sweep_rows(args.side, args.v, params)
    bad = monotonicity_violations(args.side, rows)
    if bad:
        print(f"error: {bad[0]}", file=sys.stderr)
        return EXIT_INTERNAL
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["v", "param", "bound", "skipped"])
    for r in rows:
        w.writerow([_fmt(r["v"]), _fmt(r["param"]), "" if r["bound"] is None else _fmt(r["bound"]), int(r["skipped"])])
    if args.output == "-":
        out.write(buf.getvalue())
    else:
        try:
            Path(args.output).write_text(buf.getvalue(), encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc.strerror}") from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="amgm-gap", description="Exact bounds on E X - exp E ln X.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="summary and bounds for one distribution")
    p.add_argument("input", help='JSON file, inline JSON ({"atoms": [...]} or [x1, x2, ...]), or - for stdin')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("extremal", help="two-point law attaining a bound, shifted by c")
    p.add_argument("--side", choices=("hi", "lo"), required=True)
    p.add_argument("--v", type=parse_real, required=True)
    p.add_argument("--e", type=parse_real)
    p.add_argument("--f", type=parse_real)
    p.add_argument("--u", type=parse_real, default=0.0)
    p.add_argument("--c", type=parse_real, default=0.0)
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("verify", help="run falsification campaigns")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-atoms", type=int, default=8)
    p.add_argument("--value-cap", type=float, default=100.0)
    p.add_argument("--zero-atom-prob", type=float, default=0.2)
    p.add_argument("--v", type=parse_real)
    p.add_argument("--e", type=parse_real)
    p.add_argument("--f", type=parse_real)
    p.add_argument("--side", choices=("hi", "lo"))
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ci", action="store_true", help="require an explicit --seed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="tabulate an exact bound over a (V, E|F) grid as CSV")
    p.add_argument("--side", choices=("hi", "lo"), required=True)
    p.add_argument("--v", type=parse_list, required=True)
    p.add_argument("--param", type=parse_list)
    p.add_argument("--e", type=parse_list)
    p.add_argument("--f", type=parse_list)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except SandwichViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InadmissiblePair as exc:
        print(f"error: InadmissiblePair: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DistributionError, ShiftOutOfRange, InvalidConfig, UsageError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
