"""Command-line front end: FOR derivation, bound analysis, sweeps, plot data.

Exit codes: 0 success, 1 usage or domain error, 2 input parse error,
3 audit violation under --strict.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .failures import FailurePopulation
from .hazards import AS_STATED, SIGN_CORRECTED
from .ingest import (
    ConfusionCounts,
    ParseError,
    false_omission_rate,
    load_confusion,
    load_records,
    summarize_project,
    tally_confusion,
    validate_assumptions,
)
from .report import (
    PLOT_SELECTORS,
    SweepGrid,
    analyze,
    plot_series_text,
    read_report,
    sweep,
    sweep_csv_text,
    write_report,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_PARSE = 2
EXIT_STRICT = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to the domain-error exit code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_sampling_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--samples", type=int, default=10_000,
                        help="Monte Carlo draws per point (0 disables sampling; default 10000)")
    parser.add_argument("--seed", type=int, default=12345, help="base seed (default 12345)")
    parser.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")
    parser.add_argument("--mode", choices=[AS_STATED, SIGN_CORRECTED, "both"], default="both",
                        help="expected-reliability proxy variant(s) to evaluate")
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--strict", action="store_true",
                        help="exit with status 3 when any audit verdict is 'violated'")


def build_parser() -> _Parser:
    parser = _Parser(prog="sdpbounds", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sdpbounds {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_for = sub.add_parser("for", help="false omission rate and validation verdict")
    p_for.add_argument("--fn", type=int, help="false-negative count")
    p_for.add_argument("--tn", type=int, help="true-negative count")
    p_for.add_argument("--confusion", help="confusion-matrix JSON file")
    p_for.add_argument("--records", help="per-module prediction records CSV")

    p_an = sub.add_parser("analyze", help="full bound analysis over a list of times")
    p_an.add_argument("--l", type=int, help="predicted-clean module count")
    p_an.add_argument("--p", type=float, help="per-module misclassification probability")
    p_an.add_argument("--confusion", help="confusion-matrix JSON file (sets p, and l unless given)")
    p_an.add_argument("--records", help="prediction records CSV (sets l; and p when actuals present)")
    p_an.add_argument("--K", type=float, required=True, help="manual hazard scale")
    p_an.add_argument("--m", type=float, required=True, help="manual hazard shape")
    p_an.add_argument("--K-hat", type=float, required=True, dest="k_hat", help="residual hazard scale")
    p_an.add_argument("--m-hat", type=float, required=True, dest="m_hat", help="residual hazard shape")
    p_an.add_argument("--t", type=_float_list, required=True, help="comma-separated time points")
    _add_sampling_flags(p_an)

    p_sw = sub.add_parser("sweep", help="Cartesian parameter sweep with audit summary")
    p_sw.add_argument("--l", type=_int_list, required=True)
    p_sw.add_argument("--p", type=_float_list, required=True)
    p_sw.add_argument("--K", type=_float_list, required=True)
    p_sw.add_argument("--m", type=_float_list, required=True)
    p_sw.add_argument("--K-hat", type=_float_list, required=True, dest="k_hat")
    p_sw.add_argument("--m-hat", type=_float_list, required=True, dest="m_hat")
    p_sw.add_argument("--t", type=_float_list, required=True)
    _add_sampling_flags(p_sw)

    p_pd = sub.add_parser("plotdata", help="extract plot-ready (x, y) series from a report")
    p_pd.add_argument("report", help="analyze/sweep JSON report or sweep CSV")
    p_pd.add_argument("--selector", required=True, help=f"one of {', '.join(PLOT_SELECTORS)}")
    p_pd.add_argument("--out", help="output file (default: stdout)")

    return parser


def _resolve_modes(mode: str) -> Tuple[str, ...]:
    if mode == "both":
        return (SIGN_CORRECTED, AS_STATED)
    return (mode,)


def _counts_from_args(args: argparse.Namespace) -> Tuple[ConfusionCounts, Dict[str, object]]:
    given = [name for name in ("fn", "tn") if getattr(args, name) is not None]
    sources = sum([bool(given), args.confusion is not None, args.records is not None])
    if sources != 1:
        raise ValueError("provide exactly one source: --fn/--tn, --confusion, or --records")
    if given:
        if len(given) != 2:
            raise ValueError("--fn and --tn must be given together")
        return ConfusionCounts(args.fn, args.tn), {"source": "literal", "fn": args.fn, "tn": args.tn}
    if args.confusion:
        counts = load_confusion(args.confusion)
        return counts, {"source": "confusion-file", "path": args.confusion}
    records = load_records(args.records)
    counts = tally_confusion(records)
    return counts, {"source": "records-file", "path": args.records}


def _cmd_for(args: argparse.Namespace) -> int:
    counts, provenance = _counts_from_args(args)
    verdict = validate_assumptions(counts)
    print(f"source: {provenance['source']}")
    print(f"fn={counts.fn_count} tn={counts.tn_count} predicted_clean={counts.fn_count + counts.tn_count}")
    print(f"p={false_omission_rate(counts)!r}")
    if verdict.ok:
        print("verdict: ok")
    else:
        print("verdict: violated")
        for violation in verdict.violations:
            print(f"  violation: {violation}")
    for caveat in verdict.caveats:
        print(f"  caveat: {caveat}")
    return EXIT_OK if verdict.ok else EXIT_DOMAIN


def _population_from_args(args: argparse.Namespace) -> Tuple[int, float, Dict[str, object]]:
    """Resolve (l, p) from literals and/or input files for analyze."""
    provenance: Dict[str, object] = {"source": "literal"}
    l: Optional[int] = args.l
    p: Optional[float] = args.p
    if args.confusion and args.records:
        raise ValueError("give at most one of --confusion and --records")
    if args.confusion:
        counts = load_confusion(args.confusion)
        verdict = validate_assumptions(counts)
        if not verdict.ok:
            raise ValueError("; ".join(verdict.violations))
        p = false_omission_rate(counts) if p is None else p
        l = (counts.fn_count + counts.tn_count) if l is None else l
        provenance = {"source": "confusion-file", "path": args.confusion,
                      "fn": counts.fn_count, "tn": counts.tn_count}
    elif args.records:
        records = load_records(args.records)
        has_actuals = records[0].actual is not None
        if has_actuals:
            counts = tally_confusion(records)
            verdict = validate_assumptions(counts)
            if not verdict.ok:
                raise ValueError("; ".join(verdict.violations))
            p = false_omission_rate(counts) if p is None else p
            l = (counts.fn_count + counts.tn_count) if l is None else l
            provenance = {"source": "records-file", "path": args.records,
                          "fn": counts.fn_count, "tn": counts.tn_count}
        else:
            summary = summarize_project(records)
            l = summary.l_clean if l is None else l
            provenance = {"source": "records-file", "path": args.records,
                          "n_total": summary.n_total, "l_clean": summary.l_clean}
    if l is None or p is None:
        raise ValueError("l and p must be resolvable from --l/--p or an input file")
    FailurePopulation(l, p)  # domain check with a precise message
    return l, p, provenance


def _validate_sampling(args: argparse.Namespace) -> None:
    if args.samples < 0 or (args.samples and args.samples < 1000):
        raise ValueError("--samples must be 0 or >= 1000")
    if args.seed < 0:
        raise ValueError("--seed must be non-negative")
    if args.workers < 1:
        raise ValueError("--workers must be >= 1")


def _print_point_summary(point: Dict[str, object]) -> None:
    hazard = point["hazard_audit"]
    pieces = [f"t={point['t']:g}:", f"hazard bound {point['hazard_bound']['bound']:.6g} [{hazard['verdict']}]"]
    if point["hazard_exact_tail"] is not None:
        pieces.append(f"exact {point['hazard_exact_tail']:.6g}")
    for mode, record in point["reliability_bound"].items():
        pieces.append(f"reliability[{mode}] {record['bound']['bound']:.6g} [{record['audit']['verdict']}]")
    pieces.append(f"reference {point['reference_bound']['bound']:.6g} [{point['reference_audit']['verdict']}]")
    print(" ".join(pieces))


def _count_violations(points: Sequence[Dict[str, object]]) -> int:
    violations = 0
    for point in points:
        if point["hazard_audit"]["verdict"] == "violated":
            violations += 1
        for record in point["reliability_bound"].values():
            if record["audit"]["verdict"] == "violated":
                violations += 1
        if point["reference_audit"]["verdict"] == "violated":
            violations += 1
    return violations


def _cmd_analyze(args: argparse.Namespace) -> int:
    _validate_sampling(args)
    l, p, provenance = _population_from_args(args)
    report = analyze(
        l, p, args.K, args.m, args.k_hat, args.m_hat, args.t,
        samples=args.samples, seed=args.seed, workers=args.workers,
        modes=_resolve_modes(args.mode), provenance=provenance,
    )
    if args.out:
        write_report(report, args.out)
        print(f"report written to {args.out}")
        for point in report["points"]:
            _print_point_summary(point)
    else:
        json.dump(report, sys.stdout, indent=1)
        print()
    violations = _count_violations(report["points"])
    if violations:
        print(f"audit violations: {violations}", file=sys.stderr)
        if args.strict:
            return EXIT_STRICT
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    _validate_sampling(args)
    grid = SweepGrid(
        l_values=tuple(args.l),
        p_values=tuple(args.p),
        k_values=tuple(args.K),
        m_values=tuple(args.m),
        k_hat_values=tuple(args.k_hat),
        m_hat_values=tuple(args.m_hat),
        t_values=tuple(args.t),
        samples=args.samples,
        seed=args.seed,
        modes=_resolve_modes(args.mode),
    )
    report = sweep(grid, workers=args.workers)
    if args.out:
        if args.out.endswith(".csv"):
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(sweep_csv_text(report["points"]))
        else:
            write_report(report, args.out)
        print(f"sweep written to {args.out} ({len(report['points'])} points)")
    else:
        sys.stdout.write(sweep_csv_text(report["points"]))
    print("audit summary:")
    for family, tallies in report["summary"]["audits"].items():
        counts = " ".join(f"{verdict}={count}" for verdict, count in tallies.items())
        print(f"  {family}: {counts}")
    mono = report["summary"].get("monotonicity_in_l")
    if mono is not None:
        print(
            f"monotonicity in l: {mono['monotone']}/{mono['groups_checked']} "
            f"groups strictly decreasing"
        )
        for violation in mono["violations"]:
            print(f"  non-monotone at {violation['axes']}: {violation['bounds_by_l']}")
    violations = _count_violations(report["points"])
    if violations:
        print(f"audit violations: {violations}", file=sys.stderr)
        if args.strict:
            return EXIT_STRICT
    return EXIT_OK


def _points_from_sweep_csv(path: str) -> List[Dict[str, object]]:
    """Rebuild the minimal point structure plot_series needs from a sweep CSV."""
    points: List[Dict[str, object]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            point: Dict[str, object] = {
                "l": int(row["l"]),
                "p": float(row["p"]),
                "K": float(row["K"]),
                "m": float(row["m"]),
                "K_hat": float(row["K_hat"]),
                "m_hat": float(row["m_hat"]),
                "t": float(row["t"]),
                "expected_hazard": float(row["expected_hazard"]),
                "manual_hazard": float(row["manual_hazard"]),
                "manual_reliability": float(row["manual_reliability"]),
                "expected_reliability_exact": float(row["expected_reliability_exact"]),
                "hazard_bound": {"bound": float(row["hazard_bound"])},
                "hazard_exact_tail": float(row["hazard_exact_tail"]) if row["hazard_exact_tail"] else None,
            }
            rel: Dict[str, object] = {}
            if row["rel_sc_bound"]:
                rel[SIGN_CORRECTED] = {"bound": {"bound": float(row["rel_sc_bound"])}}
            if row["rel_as_bound"]:
                rel[AS_STATED] = {"bound": {"bound": float(row["rel_as_bound"])}}
            point["reliability_bound"] = rel
            points.append(point)
    return points


def _cmd_plotdata(args: argparse.Namespace) -> int:
    if args.selector not in PLOT_SELECTORS:
        raise ValueError(f"unknown selector {args.selector!r}; expected one of {PLOT_SELECTORS}")
    if args.report.endswith(".csv"):
        points = _points_from_sweep_csv(args.report)
    else:
        document = read_report(args.report)
        if "points" not in document:
            raise ParseError(f"{args.report} is not a sdpbounds report")
        points = document["points"]
    text = plot_series_text(points, args.selector)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"series written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "for": _cmd_for,
        "analyze": _cmd_analyze,
        "sweep": _cmd_sweep,
        "plotdata": _cmd_plotdata,
    }
    try:
        return handlers[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FileNotFoundError, IsADirectoryError, PermissionError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
