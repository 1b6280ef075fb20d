"""Command-line front end.

    levyprohorov dist --metric prohorov --a nu.json --b f.cdf.json
    levyprohorov converge --sequence seq.json --limit limit.json
    levyprohorov tightness --family seq.json --epsilon 2/5
    levyprohorov quantize --a mu.json --delta 1/4
    levyprohorov audit --seed 7 --trials 50

Reports go to standard output (or ``--output``) as JSON or CSV; the default
format comes from ``LEVYPROHOROV_FORMAT``.  Every number is printed as an
exact reduced rational next to a decimal approximation.  Validation errors
exit with status 2 and a message naming the offending field.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from .audit import (
    InstanceError,
    InstanceSpec,
    gap_report_csv,
    gap_report_json,
    levy_prohorov_gap_search,
    metric_axiom_fuzz,
)
from .convergence import (
    helly_subsequence,
    levy_convergence_profile,
    portmanteau_report,
    quantize,
    tightness_witness,
)
from .io import ParseError, measure_to_json, parse_measure_file, parse_sequence_file
from .levy import kolmogorov_distance, levy_distance
from .measures import LINE, DiscreteMeasure, MeasureError, PiecewiseCdf, cdf_of
from .prohorov import DEFAULT_CAP, EnumerationCapError, prohorov_bruteforce
from .rational import RationalParseError, as_rational, fmt, rational_json
from .transport import frontier, frontier_csv, prohorov_via_flow

FORMAT_ENV = "LEVYPROHOROV_FORMAT"
AUTO_THRESHOLD = 13


class UsageError(ValueError):
    pass


def _num(q) -> dict:
    return rational_json(q)


def _opt(q) -> Optional[str]:
    return None if q is None else fmt(q)


def _rational_arg(field):
    def conv(text):
        try:
            return as_rational(text, field)
        except RationalParseError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return conv


def _cdf(m, field):
    if isinstance(m, PiecewiseCdf):
        return m
    if m.space != LINE:
        raise UsageError(f"{field}: distribution functions need a measure on the line")
    return cdf_of(m)


def _size(m) -> int:
    return len(m) if isinstance(m, DiscreteMeasure) else 0


# ---------------------------------------------------------------------------
# subcommands


def _prohorov_json(rep) -> dict:
    out = {
        "value": _num(rep.value),
        "attained": rep.attained,
        "method": rep.method,
        "certificate": {
            "witness_set": None if rep.witness_set is None else str(rep.witness_set),
            "side": rep.side,
            "violated_at_eps": _opt(rep.probe_below),
            "holds_at_eps": _opt(rep.probe_above),
            "note": rep.certificate_note,
        },
    }
    if rep.coupling is not None:
        c = rep.coupling
        show = fmt if c.mu.space == LINE else str
        out["certificate"]["coupling"] = [
            {"x": show(x), "y": show(y), "mass": fmt(c.joint[i][j])}
            for i, x in enumerate(c.mu.atoms)
            for j, y in enumerate(c.nu.atoms)
            if c.joint[i][j]
        ]
    return out


def cmd_dist(args) -> tuple:
    a = parse_measure_file(args.a)
    b = parse_measure_file(args.b)
    if args.metric in ("levy", "kolmogorov"):
        F, G = _cdf(a, "--a"), _cdf(b, "--b")
        d = (levy_distance if args.metric == "levy" else kolmogorov_distance)(F, G)
        report = {
            "metric": args.metric,
            "value": _num(d.value),
            "attained": d.attained,
            "certificate": {"witness_x": _opt(d.witness_x), "side": d.side, "violated_at_width": _opt(d.probe)},
        }
        return report, [["metric", "value", "value_approx", "attained"],
                        [args.metric, fmt(d.value), rational_json(d.value)["approx"], d.attained]]

    discrete = isinstance(a, DiscreteMeasure) and isinstance(b, DiscreteMeasure)
    method = args.method
    if method == "auto":
        method = "enumerate" if not discrete or _size(a) + _size(b) < args.auto_threshold else "flow"
    if method == "flow" and not discrete:
        raise UsageError("--method: flow needs two finitely supported measures")
    if args.frontier and not discrete:
        raise UsageError("--frontier: needs two finitely supported measures")
    if args.verify and not discrete:
        raise UsageError("--verify: needs two finitely supported measures")

    if method == "enumerate":
        rep = prohorov_bruteforce(a, b, cap=args.cap)
    else:
        rep = prohorov_via_flow(a, b)
    report = {"metric": "prohorov", **_prohorov_json(rep)}
    if args.verify:
        other = prohorov_via_flow(a, b) if method == "enumerate" else prohorov_bruteforce(a, b, cap=args.cap)
        report["verify"] = {"method": other.method, "value": _num(other.value), "agree": other.value == rep.value}
        if other.value != rep.value:
            raise AssertionError(
                f"methods disagree: {rep.method} {fmt(rep.value)} vs {other.method} {fmt(other.value)}"
            )
    if args.frontier:
        with open(args.frontier, "w", newline="") as fh:
            frontier_csv(frontier(a, b), fh)
        report["frontier"] = args.frontier
    rows = [["metric", "value", "value_approx", "attained", "method"],
            ["prohorov", fmt(rep.value), rational_json(rep.value)["approx"], rep.attained, rep.method]]
    return report, rows


def _grid(spec: str) -> list:
    try:
        lo, hi, step = (as_rational(p, "--grid") for p in spec.split(":"))
    except ValueError:
        raise UsageError(f"--grid: expected lo:hi:step, got {spec!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError("--grid: need step > 0 and lo <= hi")
    out, x = [], lo
    while x <= hi:
        out.append(x)
        x += step
    return out


def cmd_converge(args) -> tuple:
    seq, limit = parse_sequence_file(args.sequence)
    if args.limit:
        limit = parse_measure_file(args.limit)
    if limit is None:
        raise UsageError("--limit: no limit measure given and none in the sequence file")
    port = portmanteau_report(seq, limit, tol=args.tol)
    report = {
        "prefix_length": port.prefix_length,
        "window": list(port.window),
        "tol": _num(port.tol),
        "all_passed": port.all_passed,
        "conditions": {
            name: {
                "family_size": c.family_size,
                "margin": None if c.margin is None else _num(c.margin),
                "worst": c.worst,
                "passed": c.passed,
                "excluded": c.excluded,
                "oscillating": c.oscillating,
            }
            for name, c in port.conditions.items()
        },
    }
    rows = [["n", "levy"]]
    if limit.space == LINE:
        cdfs = [_cdf(m, f"sequence[{k}]") for k, m in enumerate(seq)]
        F = _cdf(limit, "--limit")
        prof = levy_convergence_profile(cdfs, F)
        report["levy_profile"] = [fmt(v) for v in prof.levy]
        rows += [[n, fmt(v)] for n, v in enumerate(prof.levy, start=1)]
        if args.grid:
            h = helly_subsequence(cdfs, _grid(args.grid), args.helly_tol)
            report["helly"] = {
                "status": h.status,
                "indices": h.indices,
                "limit": measure_to_json(h.limit),
                "levy_to_limit": [fmt(v) for v in h.levy_to_limit],
                "failing_grid_points": [fmt(g) for g in h.failing_grid_points],
            }
    return report, rows


def cmd_tightness(args) -> tuple:
    fam, _ = parse_sequence_file(args.family)
    w = tightness_witness(fam, args.epsilon)
    a, b = w.interval
    report = {
        "epsilon": _num(w.eps),
        "interval": [fmt(a), fmt(b)],
        "binding_member": w.binding + 1,
        "masses": [fmt(m) for m in w.masses],
        "holds": w.holds(),
    }
    return report, [["lo", "hi", "epsilon", "binding_member"], [fmt(a), fmt(b), fmt(w.eps), w.binding + 1]]


def cmd_quantize(args) -> tuple:
    mu = parse_measure_file(args.a)
    q = quantize(mu, args.delta)
    report = {"delta": _num(args.delta), "measure": measure_to_json(q)}
    if isinstance(mu, PiecewiseCdf) or len(mu) + len(q) <= args.cap:
        d = prohorov_bruteforce(mu, q, cap=args.cap).value
        report["prohorov_to_input"] = _num(d)
    rows = [["atom", "weight"]] + [[fmt(x), fmt(w)] for x, w in q.items()]
    return report, rows


def cmd_audit(args) -> tuple:
    spec = InstanceSpec(args.seed, args.min_atoms, args.max_atoms, args.lo, args.hi, args.denom)
    records = levy_prohorov_gap_search(spec, args.trials)
    report = gap_report_json(spec, args.trials, records)
    if args.axioms:
        report["metric_axioms"] = metric_axiom_fuzz(spec, args.axioms).to_json()
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(gap_report_csv(records))
    rows = list(csv.reader(io.StringIO(gap_report_csv(records))))
    return report, rows


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    env_fmt = os.environ.get(FORMAT_ENV, "json")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default=env_fmt if env_fmt in ("json", "csv") else "json",
                        help=f"report format (default from ${FORMAT_ENV}, else json)")
    common.add_argument("--output", "-o", help="write the report here instead of standard output")

    p = argparse.ArgumentParser(prog="levyprohorov", description="Exact Lévy, Kolmogorov and Prohorov distances.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", parents=[common], help="distance between two measures")
    d.add_argument("--metric", choices=["levy", "kolmogorov", "prohorov"], default="prohorov")
    d.add_argument("--a", required=True, help="first measure or CDF file")
    d.add_argument("--b", required=True, help="second measure or CDF file")
    d.add_argument("--method", choices=["enumerate", "flow", "auto"], default="auto")
    d.add_argument("--auto-threshold", type=int, default=AUTO_THRESHOLD,
                   help="auto picks enumerate below this many combined atoms")
    d.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap on combined atoms")
    d.add_argument("--verify", action="store_true", help="run both methods and require agreement")
    d.add_argument("--frontier", metavar="CSV", help="dump the coupling feasibility frontier")
    d.set_defaults(func=cmd_dist)

    c = sub.add_parser("converge", parents=[common], help="finite-prefix weak convergence diagnostics")
    c.add_argument("--sequence", required=True)
    c.add_argument("--limit")
    c.add_argument("--tol", type=_rational_arg("--tol"), default=0)
    c.add_argument("--grid", help="Helly selection grid lo:hi:step")
    c.add_argument("--helly-tol", type=_rational_arg("--helly-tol"), default=as_rational("1/32"))
    c.set_defaults(func=cmd_converge)

    t = sub.add_parser("tightness", parents=[common], help="compact interval carrying mass > 1 - eps")
    t.add_argument("--family", required=True)
    t.add_argument("--epsilon", type=_rational_arg("--epsilon"), required=True)
    t.set_defaults(func=cmd_tightness)

    q = sub.add_parser("quantize", parents=[common], help="finitely supported approximation")
    q.add_argument("--a", required=True)
    q.add_argument("--delta", type=_rational_arg("--delta"), required=True)
    q.add_argument("--cap", type=int, default=DEFAULT_CAP)
    q.set_defaults(func=cmd_quantize)

    a = sub.add_parser("audit", parents=[common], help="random relation audit between the distances")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--trials", type=int, default=50)
    a.add_argument("--min-atoms", type=int, default=1)
    a.add_argument("--max-atoms", type=int, default=4)
    a.add_argument("--lo", type=_rational_arg("--lo"), default=-2)
    a.add_argument("--hi", type=_rational_arg("--hi"), default=2)
    a.add_argument("--denom", type=int, default=8)
    a.add_argument("--axioms", type=int, default=0, metavar="TRIALS", help="also fuzz the metric axioms")
    a.add_argument("--csv", help="also write seed,trial,levy,prohorov,gap rows here")
    a.set_defaults(func=cmd_audit)
    return p


def _emit(report, rows, args) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    return json.dumps(report, indent=2) + "\n"


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "trials", 1) < 1:
        print("error: --trials: must be at least 1", file=sys.stderr)
        return 2
    try:
        report, rows = args.func(args)
    except (ParseError, RationalParseError, MeasureError, EnumerationCapError, InstanceError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 1
    text = _emit(report, rows, args)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
