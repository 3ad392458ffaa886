"""Experiment runner: config in, trace/summary artifacts out.

A single JSON config fully determines a run (problem, parameters, start,
seed), so regression tests can diff configs and outputs.  Traces are
serialized with 17 significant digits, which round-trips doubles exactly
and makes identical runs byte-identical.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from .core import GsParams, NonsmoothPolicy, ParamError, Termination, Trace, validate_params
from .coverage import CoverageProblem, make_coverage_oracle
from .driver import Rng, gradient_descent_baseline, run
from .testfns import (
    CantorStressProblem,
    FiniteMaxProblem,
    MaxPiece,
    cantor_stress_oracle,
    finite_max_oracle,
)

log = logging.getLogger("gradsamp")


class ConfigError(ValueError):
    pass


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing field '{key}' in {where}")
    return d[key]


def build_problem_oracle(problem: dict):
    kind = _require(problem, "type", "problem")
    if kind == "coverage":
        prob = CoverageProblem(
            n_agents=int(_require(problem, "n_agents", "problem")),
            bin_edges=tuple(_require(problem, "bin_edges", "problem")),
            theta_lower=tuple(_require(problem, "theta_lower", "problem")),
            theta_upper=tuple(_require(problem, "theta_upper", "problem")),
            total_mass=float(problem.get("total_mass", 1.0)),
            penalty_enabled=bool(problem.get("penalty_enabled", False)),
            penalty_weight=float(problem.get("penalty_weight", 1.0)),
        )
        return make_coverage_oracle(prob)
    if kind == "finite_max":
        pieces = []
        for p in _require(problem, "pieces", "problem"):
            pieces.append(MaxPiece(
                a=tuple(_require(p, "a", "problem.pieces")),
                b=float(p.get("b", 0.0)),
                Q=None if p.get("Q") is None else tuple(tuple(row) for row in p["Q"]),
            ))
        return finite_max_oracle(FiniteMaxProblem(pieces=tuple(pieces)))
    if kind == "cantor":
        return cantor_stress_oracle(
            CantorStressProblem(depth=int(_require(problem, "depth", "problem"))))
    raise ConfigError(f"unknown problem type: {kind!r}")


def build_params(d: dict) -> GsParams:
    p = GsParams()
    allowed = set(p.snapshot().keys())
    for key, val in d.items():
        if key not in allowed:
            raise ConfigError(f"unknown params field '{key}'")
        if key == "on_nonsmooth_sample":
            val = NonsmoothPolicy(val)
        setattr(p, key, val)
    return p


def write_trace_csv(trace: Trace, path: Path) -> None:
    n = len(trace.records[0].x) if trace.records else 0
    header = ["k"] + [f"x_{i}" for i in range(n)] + [
        "f", "eps", "nu", "g_norm", "t", "step_kind"]
    lines = [",".join(header)]
    for r in trace.records:
        row = [str(r.k)] + [_fmt(v) for v in r.x] + [
            _fmt(r.f_approx), _fmt(r.eps), _fmt(r.nu), _fmt(r.g_norm),
            _fmt(r.t), r.step_kind.value]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def write_trace_json(trace: Trace, path: Path) -> None:
    payload = {
        "seed": trace.seed,
        "termination": trace.termination.value,
        "f_mode": trace.f_mode,
        "params": trace.params_snapshot,
        "records": [
            {
                "k": r.k,
                "x": [float(v) for v in r.x],
                "f": r.f_approx,
                "eps": r.eps,
                "nu": r.nu,
                "g_norm": r.g_norm,
                "t": r.t,
                "step_kind": r.step_kind.value,
                "sample_count": r.sample_count,
            }
            for r in trace.records
        ],
    }
    path.write_text(json.dumps(payload, indent=1))


def _summary_block(trace: Trace, wall_s: float) -> dict:
    return {
        "final_x": [float(v) for v in np.asarray(trace.final_x)],
        "final_f": trace.final_f,
        "eps_final": trace.final_eps,
        "nu_final": trace.final_nu,
        "iterations": len(trace.records),
        "termination": trace.termination.value,
        "wall_time_s": wall_s,
    }


def run_experiment(config_path, out_dir: Optional[str] = None,
                   seed: Optional[int] = None,
                   max_iters: Optional[int] = None) -> int:
    """Execute one configured run; returns the process exit code.

    0 on completion, 2 when sampling stopped on a nonsmooth point, 1 on
    any config error (diagnostics on stderr)."""
    try:
        raw = Path(config_path).read_text()
    except OSError as e:
        print(f"config error: cannot read {config_path}: {e}", file=sys.stderr)
        return 1
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as e:
        print(f"config error: {config_path}:{e.lineno}:{e.colno}: {e.msg}",
              file=sys.stderr)
        return 1
    try:
        oracle = build_problem_oracle(_require(cfg, "problem", "config"))
        params = build_params(cfg.get("params", {}))
        if max_iters is not None:
            params.max_iters = max_iters
        x1 = np.asarray(_require(cfg, "x1", "config"), dtype=float)
        if x1.shape != (oracle.dim,):
            raise ConfigError(
                f"x1 has dimension {x1.shape}, problem needs {oracle.dim}")
        run_seed = int(cfg.get("seed", 0)) if seed is None else int(seed)
        validate_params(params, oracle.dim)
        out = Path(out_dir if out_dir is not None
                   else _require(cfg, "output_dir", "config"))
        formats = set(cfg.get("formats", ["csv", "json"]))
        if not formats <= {"csv", "json"}:
            raise ConfigError(f"unknown formats: {sorted(formats - {'csv', 'json'})}")
    except (ConfigError, ParamError, ValueError, TypeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1

    out.mkdir(parents=True, exist_ok=True)
    log.info("running experiment: %s -> %s", config_path, out)
    t0 = time.perf_counter()
    trace = run(oracle, params, x1, Rng(run_seed))
    wall = time.perf_counter() - t0
    if "csv" in formats:
        write_trace_csv(trace, out / "trace.csv")
    if "json" in formats:
        write_trace_json(trace, out / "trace.json")

    summary = {"seed": run_seed, "sampling": _summary_block(trace, wall)}
    if cfg.get("run_baseline_gd", False):
        t0 = time.perf_counter()
        gd = gradient_descent_baseline(oracle, params, x1)
        wall_gd = time.perf_counter() - t0
        write_trace_csv(gd, out / "baseline_trace.csv")
        summary["baseline_gd"] = _summary_block(gd, wall_gd)
        summary["comparison"] = {
            "f_gap_gd_minus_sampling": gd.final_f - trace.final_f,
            "gd_stalled": gd.termination == Termination.STALLED,
        }
    (out / "summary.json").write_text(json.dumps(summary, indent=1))

    if trace.termination == Termination.NONSMOOTH_SAMPLE_STOP:
        return 2
    return 0


def emit_plot_data(trace_path, out_path) -> int:
    """Convert a trace CSV into a whitespace-separated plot-ready file
    (iteration, coordinates, f, ||g||, eps, nu).  Byte-stable."""
    try:
        text = Path(trace_path).read_text()
    except OSError as e:
        print(f"error: cannot read {trace_path}: {e}", file=sys.stderr)
        return 1
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        print(f"error: empty trace file {trace_path}", file=sys.stderr)
        return 1
    header = lines[0].split(",")
    try:
        coord_cols = [i for i, h in enumerate(header) if h.startswith("x_")]
        k_col = header.index("k")
        f_col = header.index("f")
        g_col = header.index("g_norm")
        e_col = header.index("eps")
        n_col = header.index("nu")
    except ValueError:
        print(f"error: malformed trace header in {trace_path}", file=sys.stderr)
        return 1
    out_lines = ["# iter " + " ".join(header[i] for i in coord_cols)
                 + " f g_norm eps nu"]
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            print(f"error: malformed trace row in {trace_path}", file=sys.stderr)
            return 1
        out_lines.append(" ".join([parts[k_col]]
                                  + [parts[i] for i in coord_cols]
                                  + [parts[f_col], parts[g_col],
                                     parts[e_col], parts[n_col]]))
    Path(out_path).write_text("\n".join(out_lines) + "\n")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=os.environ.get("GRADSAMP_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    parser = argparse.ArgumentParser(
        prog="gradsamp",
        description="Gradient-sampling experiments for min-max objectives")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="override output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override seed")
    p_run.add_argument("--max-iters", type=int, default=None,
                       help="override iteration cap")

    p_plot = sub.add_parser("plot-data",
                            help="convert a trace CSV into plot-ready columns")
    p_plot.add_argument("trace")
    p_plot.add_argument("out")

    args = parser.parse_args(argv)
    if args.command == "run":
        return run_experiment(args.config, out_dir=args.out, seed=args.seed,
                              max_iters=args.max_iters)
    return emit_plot_data(args.trace, args.out)


if __name__ == "__main__":
    sys.exit(main())
