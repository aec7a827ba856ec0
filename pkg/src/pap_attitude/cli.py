"""Command-line entry point: run scenarios and write trace and summary CSV files."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis
from .config import BUILTIN, describe_keys, parse_assignment, parse_config, apply_overrides
from .errors import ConfigError, NonFiniteState, PapError, SingularJacobian
from .sim import TRACE_COLUMNS, ScenarioConfig, run_monte_carlo, run_scenario

log = logging.getLogger("pap_attitude")

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_NONFINITE = 4
EXIT_IO = 5
EXIT_SINGULAR = 6
EXIT_CASE_FAILED = 7

SUMMARY_COLUMNS = (
    ["case", "seed", "error"]
    + [f"settling{i}" for i in (1, 2, 3)]
    + [f"steady_max{i}" for i in (1, 2, 3)]
    + [f"overshoot{i}" for i in (1, 2, 3)]
    + ["tube_entry", "h_entry", "pap_satisfied", "pap_violations"]
    + ["xi_m", "delta_S", "delta_z", "feasible", "T_H1", "T_h", "T_H2", "G_B", "H_B"]
)


def write_trace_csv(trace, path) -> None:
    """Write the trace with a fixed header, 9 significant digits, dot decimals."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for row in trace.data:
            fh.write(",".join("%.8e" % v for v in row) + "\n")


def _fmt(v):
    if v is None:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return "NA" if not np.isfinite(v) else "%.8e" % v


def summary_row(case: int, seed: int, report=None, bounds=None, xi_m=None, error=None) -> dict:
    row = {c: None for c in SUMMARY_COLUMNS}
    row.update(case=case, seed=seed, error=error or "")
    if report is not None:
        for i in range(3):
            row[f"settling{i + 1}"] = report.settling_time[i]
            row[f"steady_max{i + 1}"] = report.steady_state_max[i]
            row[f"overshoot{i + 1}"] = report.overshoot[i]
        row.update(tube_entry=report.tube_entry_time, h_entry=report.h_entry_time,
                   pap_satisfied=report.pap_satisfied, pap_violations=report.pap_violations)
    if bounds is not None:
        row.update(xi_m=xi_m, delta_S=bounds.delta_S, delta_z=bounds.delta_z, feasible=bounds.feasible)
        if bounds.feasible:
            row.update(T_H1=bounds.T_H1, T_h=bounds.T_h, T_H2=bounds.T_H2, G_B=bounds.G_B, H_B=bounds.H_B)
    return row


def write_summary_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in SUMMARY_COLUMNS])


def observer_error_bound(trace, t_from: float) -> float:
    """Largest ``|d_hat - d|`` from ``t_from`` on; used when no xi_m is supplied."""
    tail = trace.t >= t_from
    err = trace.block("dhat")[tail] - trace.block("d")[tail]
    return float(np.linalg.norm(err, axis=1).max()) if tail.any() else 0.0


def evaluate(trace, cfg: ScenarioConfig, case: int = 0, xi_m: float | None = None) -> dict:
    g = cfg.gains
    report = analysis.performance_report(trace, g)
    if xi_m is None:
        xi_m = observer_error_bound(trace, cfg.t_sd)
    bounds = analysis.derived_constants(g, cfg.spacecraft, cfg.observer, xi_m)
    if bounds.feasible:
        bounds = analysis.attraction_bounds(trace["H"][0], trace["h"][0], bounds, g)
    return summary_row(case, trace.seed, report, bounds, xi_m)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pap-attitude", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("normal", "nominal maneuver from rest"),
        ("robust", "5 deg/s initial rate and a 0.5 N m pulse at t = 100 s"),
        ("montecarlo", "random initial attitudes, reference starting at q_ev(0)"),
        ("custom", "scenario defined entirely by --config/--set"),
    ]:
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", type=Path, help="flat 'section.key = value' file")
        s.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        s.add_argument("--out", type=Path, default=Path("."), help="output directory")
        s.add_argument("--seed", type=int)
        s.add_argument("--xi-m", type=float, help="observer error bound for the theory constants")
        s.add_argument("--no-traces", action="store_true", help="skip per-case trace files")
        if name == "montecarlo":
            s.add_argument("--cases", type=int, help="number of cases (default 100)")
            s.add_argument("--workers", type=int, default=1)
    sub.add_parser("keys", help="list configuration keys and units")
    return p


def load_config(args) -> ScenarioConfig:
    base = BUILTIN.get(args.command, BUILTIN["normal"])()
    if args.command == "custom" and args.config is None:
        raise ConfigError("custom requires --config")
    cfg = base
    if args.config is not None:
        cfg = parse_config(args.config.read_text(), base)
    cfg = apply_overrides(cfg, [parse_assignment(s) for s in args.overrides])
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "cases", None) is not None:
        cfg = apply_overrides(cfg, [(0, "sim.case_count", str(args.cases))])
    return cfg


def run(args) -> int:
    cfg = load_config(args)
    args.out.mkdir(parents=True, exist_ok=True)
    if args.command != "montecarlo":
        trace = run_scenario(cfg)
        if not args.no_traces:
            write_trace_csv(trace, args.out / f"{args.command}_trace.csv")
        write_summary_csv([evaluate(trace, cfg, 0, args.xi_m)], args.out / f"{args.command}_summary.csv")
        return EXIT_OK
    rows, failed = [], 0
    for case in run_monte_carlo(cfg, workers=args.workers):
        if not case.ok:
            failed += 1
            log.warning("case %d failed: %s", case.case_id, case.error)
            rows.append(summary_row(case.case_id, case.seed, error=case.error))
            continue
        sub_cfg = replace(cfg, q_s0=tuple(case.q_s0), seed=case.seed)
        rows.append(evaluate(case.trace, sub_cfg, case.case_id, args.xi_m))
        if not args.no_traces:
            write_trace_csv(case.trace, args.out / f"montecarlo_case{case.case_id:04d}.csv")
    write_summary_csv(rows, args.out / "montecarlo_summary.csv")
    return EXIT_CASE_FAILED if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "keys":
        print(describe_keys())
        return EXIT_OK
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteState as exc:
        print(f"simulation diverged: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except SingularJacobian as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
