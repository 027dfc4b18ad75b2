"""zeroscope command line.

Exit codes: 0 success; 1 bad arguments / IO; 2 indecisive classification;
3 unresolvable contour; 4 lemma identity failure; 5 inconsistent
corroboration; 6 growth-bound violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from typing import List, Optional

from . import __version__
from .errors import SubdivisionStall, Unresolvable, ZeroscopeError
from .families import parse_family
from .hadamard_probe import random_model, verify_lemma
from .precision import ENV_VAR, MIN_PREC_BITS, ctx, prec_from_env, set_precision
from .series_core import growth_bound_check, make_tail_certificate
from .theorem_harness import INDECISIVE, certified_evaluator, classify, corroborate
from .zero_counter import Disk, localize_zeros

EXIT_OK, EXIT_USAGE, EXIT_INDECISIVE, EXIT_UNRESOLVABLE, EXIT_LEMMA, EXIT_INCONSISTENT, EXIT_GROWTH = range(7)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _digits() -> int:
    return int(math.ceil(ctx.prec * math.log10(2))) + 1


def full(x) -> str:
    """Round-trip-safe decimal string at the working precision."""
    return ctx.nstr(ctx.convert(x), _digits())


def _num(x):
    if x is None:
        return None
    v = float(x)
    if math.isinf(v):
        return "inf"
    return v


def _zero_rows(report) -> List[dict]:
    if report is None:
        return []
    return [
        {
            "re": float(z.location.real),
            "im": float(z.location.imag),
            "err": float(z.error_radius),
            "mult": z.multiplicity,
        }
        for z in report.zeros
    ]


def _verdict_report(family, verdict, command) -> dict:
    diag = list(verdict.diagnostics)
    diag.append(f"hypotheses checked to horizon n_max={verdict.horizon} only")
    radius = verdict.radius_estimate
    if verdict.profile is not None and verdict.profile.classification == "infinite":
        radius = math.inf
    return {
        "command": command,
        "family": family.spec,
        "verdict": verdict.describe(),
        "horizon": verdict.horizon,
        "radius_estimate": _num(radius),
        "radii": [],
        "counts": [],
        "zeros": [],
        "consistent": None,
        "diagnostics": diag,
    }


def _emit(args, payload: dict, rows: Optional[List[dict]] = None, columns=None):
    fmt = args.format
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        data = rows if rows is not None else [{k: v for k, v in payload.items() if not isinstance(v, (list, dict))}]
        cols = columns or (list(data[0].keys()) if data else [])
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for row in data:
            w.writerow(row)
        text = buf.getvalue()
    else:
        text = _table(payload, rows, columns)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)


def _table(payload, rows, columns) -> str:
    lines = []
    for k, v in payload.items():
        if isinstance(v, list) and v and isinstance(v[0], dict):
            continue
        lines.append(f"{k:>16}: {v}")
    if rows:
        cols = columns or list(rows[0].keys())
        widths = [max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in cols]
        lines.append("  ".join(c.rjust(w) for c, w in zip(cols, widths)))
        for r in rows:
            lines.append("  ".join(str(r.get(c, "")).rjust(w) for c, w in zip(cols, widths)))
    return "\n".join(lines) + "\n"


def _radii(text: Optional[str], family) -> List[float]:
    if not text:
        return list(family.default_radii)
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad radii list {text!r}") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_classify(args) -> int:
    family = parse_family(args.family)
    verdict = classify(family.stream, args.n_max)
    _emit(args, _verdict_report(family, verdict, "classify"))
    return EXIT_INDECISIVE if verdict.classification == INDECISIVE else EXIT_OK


def cmd_zeros(args) -> int:
    family = parse_family(args.family)
    verdict = classify(family.stream, args.n_max)
    f, _ = certified_evaluator(family.stream, verdict)
    disk = Disk(complex(args.center), args.radius)
    try:
        report = localize_zeros(f, disk, args.eps)
    except (Unresolvable, SubdivisionStall) as exc:
        print(f"zeroscope: {exc}", file=sys.stderr)
        return EXIT_UNRESOLVABLE
    payload = _verdict_report(family, verdict, "zeros")
    payload["radii"] = [float(report.disk.radius)]
    payload["counts"] = [report.count]
    payload["zeros"] = _zero_rows(report)
    payload["diagnostics"] += report.diagnostics
    payload["diagnostics"].append(f"contour samples used: {report.samples_used}")
    plot_rows = [
        {"re": full(z.location.real), "im": full(z.location.imag), "err": full(z.error_radius), "mult": z.multiplicity}
        for z in report.zeros
    ]
    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8", newline="") as fp:
            w = csv.DictWriter(fp, fieldnames=["re", "im", "err", "mult"], lineterminator="\n")
            w.writeheader()
            w.writerows(plot_rows)
    _emit(args, payload, plot_rows, ["re", "im", "err", "mult"])
    return EXIT_OK


def cmd_corroborate(args) -> int:
    family = parse_family(args.family)
    radii = _radii(args.radii, family)
    verdict = classify(family.stream, args.n_max)
    report = corroborate(family.stream, verdict, radii, localize_radius=radii[0], localize_eps=args.eps)
    payload = _verdict_report(family, verdict, "corroborate")
    payload.update(
        radii=radii,
        counts=report.counts,
        zeros=_zero_rows(report.zeros),
        consistent=report.consistent,
    )
    payload["diagnostics"] += report.diagnostics
    rows = [{"radius": r, "count": c} for r, c in zip(radii, report.counts)]
    _emit(args, payload, rows, ["radius", "count"])
    return EXIT_OK if report.consistent else EXIT_INCONSISTENT


def _parse_range(text: str):
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"range must look like LO..HI, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad range {text!r}") from None


def cmd_verify_lemma(args) -> int:
    trials = []
    if args.family:
        family = parse_family(args.family)
        if family.model is None:
            raise UsageError("verify-lemma needs an exppoly: family")
        lo, hi = _parse_range(args.n) if args.n else (family.model.N + 1, family.model.N + 40)
        trials.append((family.model, lo, hi))
    elif args.random_trials:
        rng = random.Random(args.seed)
        for _ in range(args.random_trials):
            m = random_model(rng, args.max_degree)
            trials.append((m, m.N + 1, m.N + 40))
    else:
        raise UsageError("give --family exppoly:... or --random-trials T")
    rows, failed = [], None
    for i, (m, lo, hi) in enumerate(trials):
        ok = verify_lemma(m, (lo, hi))
        rows.append({"trial": i, "k": str(m.k), "P": ",".join(str(a) for a in m.P), "N": m.N,
                     "n_range": f"{lo}..{hi}", "result": "pass" if ok else "FAIL"})
        if not ok and failed is None:
            failed = m
    payload = {"command": "verify-lemma", "trials": len(rows), "passed": failed is None, "table": rows}
    _emit(args, payload, rows, ["trial", "k", "P", "N", "n_range", "result"])
    if failed is not None:
        print(f"zeroscope: identity failed for model {failed.describe()}", file=sys.stderr)
        return EXIT_LEMMA
    return EXIT_OK


def cmd_growth_check(args) -> int:
    family = parse_family(args.family)
    cert = make_tail_certificate(family.stream, args.delta, args.n_probe)
    rng = random.Random(args.seed)
    zs = []
    for _ in range(args.points):
        rad = args.radius * math.sqrt(rng.random())
        zs.append(ctx.mpc(rad) * ctx.expjpi(ctx.mpf(2 * rng.random())))
    result = growth_bound_check(family.stream, cert, zs)
    payload = {
        "command": "growth-check",
        "family": family.spec,
        "delta": float(cert.delta),
        "M": float(cert.M),
        "heuristic": cert.heuristic,
        "points": len(zs),
        "radius": args.radius,
        "seed": args.seed,
        "worst_ratio": result.worst_ratio,
        "violations": result.violations,
        "ok": result.ok,
    }
    _emit(args, payload)
    return EXIT_OK if result.ok else EXIT_GROWTH


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prec", type=int, default=None, help=f"working precision in bits (default ${ENV_VAR} or 256)")
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")

    parser = _Parser(prog="zeroscope", description="Zero-counting corroboration for entire power series.")
    parser.add_argument("--version", action="version", version=f"zeroscope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common], help="classify a family by its factorial-weighted series")
    p.add_argument("--family", required=True)
    p.add_argument("--n-max", type=int, default=128)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("zeros", parents=[common], help="localize zeros inside a disk")
    p.add_argument("--family", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--center", type=complex, default=0j)
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--n-max", type=int, default=128)
    p.add_argument("--plot-data", default=None, help="CSV file of re,im,err,mult rows")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("corroborate", parents=[common], help="compare the verdict with zero counts on growing disks")
    p.add_argument("--family", required=True)
    p.add_argument("--radii", default=None, help="comma-separated increasing radii (default: family registry)")
    p.add_argument("--eps", type=float, default=1e-10)
    p.add_argument("--n-max", type=int, default=128)
    p.set_defaults(func=cmd_corroborate)

    p = sub.add_parser("verify-lemma", parents=[common], help="exact check of f^(n)(0) = k^n Q(n)")
    p.add_argument("--family", default=None)
    p.add_argument("--n", default=None, help="index range LO..HI (LO must exceed deg P)")
    p.add_argument("--random-trials", type=int, default=0)
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("growth-check", parents=[common], help="check |f(z)| <= M exp(2|z|/delta) at random points")
    p.add_argument("--family", required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--n-probe", type=int, default=128)
    p.add_argument("--radius", type=float, default=10.0)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_growth_check)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        bits = args.prec if args.prec is not None else prec_from_env()
        if bits < MIN_PREC_BITS:
            raise UsageError(f"precision must be at least {MIN_PREC_BITS} bits")
        if getattr(args, "eps", 1.0) <= 0:
            raise UsageError("eps must be positive")
        set_precision(bits)
        return args.func(args)
    except UsageError as exc:
        print(f"zeroscope: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ValueError, OSError) as exc:
        print(f"zeroscope: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZeroscopeError as exc:
        print(f"zeroscope: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
