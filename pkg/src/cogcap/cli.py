"""Command-line front end: parameter sweeps as CSV and an analytic versus
Monte Carlo validation report."""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np
from scipy import stats

from .config import ConfigError, ExperimentConfig, load_config, validate_config
from .fading import ratio_log_quantile
from .optimizer import (
    DegenerateInputError,
    NumericalFailure,
    effective_capacity,
    interference_terms,
    iavg_from_db,
    iavg_to_db,
    optimal_effective_capacity,
    solve_lambda,
)
from .sensing import detector_performance, roc_point
from .simulator import (
    MIN_FRAMES_FOR_ESTIMATE,
    estimate_effective_capacity_mc,
    simulate_frames,
    simulate_queue,
)
from .statemodel import interference_probability, scenario_probabilities, transition_probabilities

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

COMMAND_SWEEP = {
    "sensing-curves": "gamma",
    "scenario-probs": "pd",
    "effcap-vs-pd": "pd",
    "effcap-vs-iavg": "iavg_db",
    "pint-curves": "pd",
}
COLUMNS = {
    "sensing-curves": ["gamma", "N", "pf", "pd"],
    "scenario-probs": ["pd", "pf", "M", "ps1", "ps2", "ps3", "ps4"],
    "effcap-vs-pd": ["pd", "pf", "M", "iavg_db", "re_bits_s_hz", "lambda"],
    "effcap-vs-iavg": ["iavg_db", "M", "re_bits_s_hz", "lambda"],
    "pint-curves": ["pd", "pf", "M", "p_int"],
}
DEFAULT_PD_GRID = (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99)
DEFAULT_IAVG_GRID = tuple(float(v) for v in range(-40, 12, 2))

ROC_NOTE = ("pd sweep follows the detector ROC: for each target pd the threshold is "
            "solved at the configured sensing time and variances and pf is read off "
            "the same threshold")
FIXED_PF_NOTE = "pd sweep holds pf at the configured value"

# relative SE above which an effective-capacity or slope comparison says nothing
MAX_RELATIVE_SE = 0.05
# share of the interference average that may sit in ratios rarer than 1/frames
MAX_UNSEEN_INTERFERENCE = 0.01
QUEUE_SLOPE_TOL = 0.15
CHI2_LEVEL = 0.01


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, np.generic):
        return _json_safe(v.item())
    return v


def config_record(cfg: ExperimentConfig) -> dict:
    """Config echo for artifacts; the output directory is left out so runs
    into different directories produce identical files."""
    rec = asdict(cfg)
    rec.pop("out", None)
    return rec


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# -------------------------------------------------------------- sweeps

def sweep_grid(cfg: ExperimentConfig, command: str) -> tuple[str, tuple]:
    var = COMMAND_SWEEP[command]
    if cfg.sweep is not None and cfg.sweep != var:
        raise ConfigError(f"{command} sweeps {var!r}, but the config sets sweep = {cfg.sweep}")
    if cfg.grid is not None:
        return var, tuple(cfg.grid)
    if var == "pd":
        return var, DEFAULT_PD_GRID
    if var == "iavg_db":
        return var, DEFAULT_IAVG_GRID
    return var, tuple(float(np.round(v, 12)) * cfg.sigma_n2 for v in np.linspace(0.5, 3.0, 26))


def pd_point(cfg: ExperimentConfig, pd: float) -> tuple[float, float]:
    """(pd, pf) pair for one sweep point."""
    if cfg.pd_sweep == "fixed_pf":
        return pd, cfg.pf
    _, pf, pd_ = roc_point(cfg.sensing_params(), pd)
    return pd_, pf


def _check_probability_grid(grid):
    if any(not (0.0 < g < 1.0) for g in grid):
        raise ConfigError("pd grid values must lie strictly inside (0, 1)")


def _effcap_task(args):
    cfg, M, pd, pf, I_avg = args
    res = optimal_effective_capacity(cfg.system(M=M, pd=pd, pf=pf, I_avg=I_avg))
    return res.re, res.log_lam


def _map(fn, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def _lambda_value(log_lam: float) -> float:
    return math.exp(log_lam) if log_lam is not None else math.nan


def run_experiment(cfg: ExperimentConfig, command: str, out_dir: Path | str,
                   workers: int = 1) -> list[Path]:
    """Compute one parameter sweep and write ``<command>.csv`` plus a
    ``<command>.meta.json`` sidecar. Rows follow grid order within each M
    (or N) block, independent of ``workers``."""
    if command not in COMMAND_SWEEP:
        raise ValueError(f"unknown experiment {command!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    var, grid = sweep_grid(cfg, command)
    meta = {"command": command, "columns": COLUMNS[command], "sweep": var,
            "grid": list(grid), "config": config_record(cfg)}
    rows = []

    if command == "sensing-curves":
        if any(g < 0 for g in grid):
            raise ConfigError("gamma grid must be nonnegative")
        for N in cfg.N_list:
            sp = cfg.sensing_params(N)
            for g in grid:
                pf, pd = detector_performance(sp.with_gamma(g))
                rows.append((g, N, pf, pd))
        meta["series"] = {"N": list(cfg.N_list)}
        meta["n_samples"] = [cfg.sensing_params(N).n_samples for N in cfg.N_list]

    elif command in ("scenario-probs", "pint-curves"):
        _check_probability_grid(grid)
        points = [pd_point(cfg, g) for g in grid]
        for M in cfg.M_list:
            for pd, pf in points:
                inp = cfg.system(M=M, pd=pd, pf=pf).inputs
                if command == "scenario-probs":
                    s = scenario_probabilities(inp)
                    rows.append((pd, pf, M, s.ps1, s.ps2, s.ps3, s.ps4))
                else:
                    rows.append((pd, pf, M, interference_probability(inp)[0]))
        meta["pd_sweep"] = ROC_NOTE if cfg.pd_sweep == "roc" else FIXED_PF_NOTE
        meta["series"] = {"M": list(cfg.M_list)}

    elif command == "effcap-vs-pd":
        _check_probability_grid(grid)
        points = [pd_point(cfg, g) for g in grid]
        iavg_db = iavg_to_db(cfg.I_avg, cfg.primary_noise_power / cfg.Bc, cfg.Bc)
        tasks = [(cfg, M, pd, pf, cfg.I_avg) for M in cfg.M_list for pd, pf in points]
        results = _map(_effcap_task, tasks, workers)
        for (_, M, pd, pf, _), (re, log_lam) in zip(tasks, results):
            rows.append((pd, pf, M, iavg_db, re, _lambda_value(log_lam)))
        meta["log_lambda"] = [r[1] for r in results]
        meta["pd_sweep"] = ROC_NOTE if cfg.pd_sweep == "roc" else FIXED_PF_NOTE
        meta["series"] = {"M": list(cfg.M_list)}

    elif command == "effcap-vs-iavg":
        sigma_np2 = cfg.primary_noise_power / cfg.Bc
        tasks = [(cfg, M, cfg.pd, cfg.pf, iavg_from_db(db, sigma_np2, cfg.Bc))
                 for M in cfg.M_list for db in grid]
        results = _map(_effcap_task, tasks, workers)
        dbs = [db for _ in cfg.M_list for db in grid]
        for db, (_, M, *_), (re, log_lam) in zip(dbs, tasks, results):
            rows.append((db, M, re, _lambda_value(log_lam)))
        meta["log_lambda"] = [r[1] for r in results]
        meta["series"] = {"M": list(cfg.M_list)}

    if command in ("effcap-vs-pd", "effcap-vs-iavg"):
        meta["lambda_note"] = ("lambda underflows to 0 in double precision when log(lambda) "
                               "< -745; log_lambda lists the exact values in row order")

    csv_path = out / f"{command}.csv"
    meta_path = out / f"{command}.meta.json"
    write_csv(csv_path, COLUMNS[command], rows)
    write_json(meta_path, meta)
    return [csv_path, meta_path]


# ------------------------------------------------------------ validate

def _comparison(name, analytic, mc, se, tolerance, status, note=""):
    return {"name": name, "analytic": analytic, "mc": mc, "se": se,
            "tolerance": tolerance, "status": status, "note": note}


def _chi_square_states(counts, probs, n):
    expected = np.asarray(probs) * n
    counts = np.asarray(counts)
    impossible = expected == 0
    if np.any(counts[impossible] > 0):
        return 0.0, "frames landed in a state of zero probability"
    keep = expected >= 5
    obs = list(counts[keep])
    exp = list(expected[keep])
    pooled_obs = counts[~keep & ~impossible].sum()
    pooled_exp = expected[~keep & ~impossible].sum()
    if pooled_exp >= 5:
        obs.append(pooled_obs)
        exp.append(pooled_exp)
    elif pooled_exp > 0 and exp:
        j = int(np.argmax(exp))
        obs[j] += pooled_obs
        exp[j] += pooled_exp
    if len(obs) < 2:
        return 1.0, "fewer than two bins with enough expected counts"
    exp = np.asarray(exp, float)
    exp *= np.sum(obs) / exp.sum()
    return float(stats.chisquare(obs, exp).pvalue), ""


def run_validation(cfg: ExperimentConfig, workers: int = 1) -> dict:
    """Analytic pipeline versus the frame simulator at the configured point."""
    p = cfg.system()
    pol = solve_lambda(p)
    eff = effective_capacity(pol, p)
    agg = simulate_frames(p, pol, cfg.frames, cfg.seed, workers=workers)
    n = agg.n
    small = n < MIN_FRAMES_FOR_ESTIMATE
    small_note = f"fewer than {MIN_FRAMES_FOR_ESTIMATE} frames"
    comps = []

    # effective capacity
    est = estimate_effective_capacity_mc(agg, p, allow_small=True)
    tol = max(0.01 * eff.re, 3.0 * est.se)
    if small or not (est.se <= MAX_RELATIVE_SE * max(eff.re, 1e-300)):
        status, note = "inconclusive", small_note if small else "standard error too large"
    else:
        status, note = ("pass" if abs(est.re - eff.re) <= tol else "fail"), ""
    comps.append(_comparison("effective_capacity", eff.re, est.re, est.se, tol, status, note))

    # interference: the full average, and the part carried by ratios the
    # simulation can actually reach at this frame count
    mc_i, se_i = agg.mean_interference, agg.se_interference
    log_floor = ratio_log_quantile(p.model, 1.0 / max(n, 2))
    observable = interference_terms(pol, p, log_floor).total
    unseen = max(0.0, 1.0 - observable / eff.achieved_interference)
    tol_i = 3.0 * se_i
    if small:
        status, note = "inconclusive", small_note
    elif unseen > MAX_UNSEEN_INTERFERENCE:
        status = "inconclusive"
        note = (f"{unseen:.1%} of the average comes from selected ratios below "
                f"exp({log_floor:.3g}), rarer than one frame in {n}")
    else:
        status, note = ("pass" if abs(mc_i - p.I_avg) <= tol_i else "fail"), ""
    comps.append(_comparison("interference", p.I_avg, mc_i, se_i, tol_i, status, note))
    if small:
        status = "inconclusive"
    else:
        status = "pass" if abs(mc_i - observable) <= tol_i else "fail"
    comps.append(_comparison("interference_observable", observable, mc_i, se_i, tol_i, status,
                             f"analytic average over selected ratios >= exp({log_floor:.6g})"))

    # scenario frequencies, each within 3 binomial standard errors
    ps = scenario_probabilities(p.inputs).as_array()
    freq = agg.scenario_frequencies
    se_s = np.sqrt(ps * (1.0 - ps) / n)
    ok = [(agg.scenario_counts[i] == 0) if ps[i] == 0 else abs(freq[i] - ps[i]) <= 3 * se_s[i]
          for i in range(4)]
    status = "inconclusive" if small else ("pass" if all(ok) else "fail")
    comps.append(_comparison("scenario_frequencies", ps.tolist(), freq.tolist(), se_s.tolist(),
                             (3 * se_s).tolist(), status, small_note if small else ""))

    probs = transition_probabilities(p.inputs).p
    pval, note = _chi_square_states(agg.state_counts, probs, n)
    status = "inconclusive" if small else ("pass" if pval >= CHI2_LEVEL else "fail")
    comps.append(_comparison("state_chi_square", probs.tolist(), agg.state_frequencies.tolist(),
                             pval, CHI2_LEVEL, status, note or "value in 'se' is the p-value"))

    # queue tail decay with arrivals at the effective capacity
    arrival = eff.re * p.T * p.Bc
    if arrival > 0:
        tr = simulate_queue(p, pol, arrival, cfg.queue_frames, cfg.seed)
        slope, sse = tr.slope, tr.slope_se
        if not math.isfinite(slope) or not (sse <= MAX_RELATIVE_SE * p.theta):
            status, note = "inconclusive", "too few tail exceedances for a slope fit"
        else:
            status = "pass" if abs(slope - p.theta) <= QUEUE_SLOPE_TOL * p.theta else "fail"
            note = f"fit on {int(np.sum(tr.fit_mask))} backlog levels"
    else:
        slope, sse, status, note = math.nan, math.nan, "inconclusive", "zero effective capacity"
    comps.append(_comparison("queue_slope", p.theta, slope, sse, QUEUE_SLOPE_TOL * p.theta,
                             status, note))

    failed = [c["name"] for c in comps if c["status"] == "fail"]
    return {
        "config": config_record(cfg),
        "frames": n,
        "queue_frames": cfg.queue_frames,
        "seed": cfg.seed,
        "log_lambda": pol.log_lam,
        "re_bits_s_hz": eff.re,
        "achieved_interference": eff.achieved_interference,
        "comparisons": comps,
        "failed": failed,
        "all_pass": all(c["status"] == "pass" for c in comps),
    }


def format_report(summary: dict) -> str:
    lines = [f"validation: {summary['frames']} frames, seed {summary['seed']}, "
             f"R_E = {summary['re_bits_s_hz']:.6g} bits/s/Hz, "
             f"log(lambda) = {summary['log_lambda']:.6g}"]
    for c in summary["comparisons"]:
        a, m = c["analytic"], c["mc"]
        if isinstance(a, list):
            shown = "analytic=[" + ", ".join(f"{v:.6g}" for v in a) + "] mc=[" + \
                    ", ".join(f"{v:.6g}" for v in m) + "]"
        else:
            shown = f"analytic={a:.6g} mc={m:.6g}"
        extra = f" ({c['note']})" if c["note"] else ""
        lines.append(f"  {c['status'].upper():12s} {c['name']}: {shown}{extra}")
    verdict = "FAIL: " + ", ".join(summary["failed"]) if summary["failed"] else "no failures"
    lines.append(verdict)
    return "\n".join(lines) + "\n"


def write_validation(summary: dict, out_dir: Path | str) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sc = next(c for c in summary["comparisons"] if c["name"] == "scenario_frequencies")
    rows = [(i + 1, sc["analytic"][i], sc["mc"][i], sc["se"][i]) for i in range(4)]
    paths = [out / "validate_scenarios.csv", out / "validate_summary.json",
             out / "validate_report.txt"]
    write_csv(paths[0], ["scenario", "analytic", "mc", "se"], rows)
    write_json(paths[1], summary)
    paths[2].write_text(format_report(summary), encoding="utf-8")
    return paths


# -------------------------------------------------------------- gnuplot

_GNUPLOT_AXES = {
    "sensing-curves": ("gamma", "probability", 1, (3, 4), 2),
    "scenario-probs": ("P_d", "scenario probability", 1, (4, 5, 6, 7), 3),
    "effcap-vs-pd": ("P_d", "R_E (bits/s/Hz)", 1, (5,), 3),
    "effcap-vs-iavg": ("I_avg (dB)", "R_E (bits/s/Hz)", 1, (3,), 2),
    "pint-curves": ("P_d", "P_int", 1, (4,), 3),
}


def gnuplot_script(command: str) -> str:
    xlabel, ylabel, xcol, ycols, series = _GNUPLOT_AXES[command]
    csv = f"{command}.csv"
    plots = ", \\\n     ".join(
        f"for [s in series] '{csv}' using (column({series}) == real(s) ? ${xcol} : 1/0):{y} "
        f"with linespoints title sprintf('{COLUMNS[command][y - 1]}, "
        f"{COLUMNS[command][series - 1]}=%s', s)"
        for y in ycols)
    return (f"# plots {csv}; run from the directory holding the CSV\n"
            f"set datafile separator ','\n"
            f"set key autotitle columnhead\n"
            f"set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"
            f"series = system(\"tail -n +2 {csv} | cut -d, -f{series} | sort -gu | tr '\\\\n' ' '\")\n"
            f"plot {plots}\n")


# ----------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output directory (default: config 'out' or .)")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--frames", type=int, help="simulated frames")
    common.add_argument("--workers", type=int, default=1, help="parallel workers")
    common.add_argument("--quiet", action="store_true", help="print nothing on success")

    parser = argparse.ArgumentParser(
        prog="cogcap",
        description="Effective capacity of a multichannel cognitive radio link.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMAND_SWEEP:
        sub.add_parser(name, parents=[common], help=f"write {name}.csv")
    sub.add_parser("validate", parents=[common], help="analytic versus Monte Carlo report")
    gp = sub.add_parser("gnuplot-script", parents=[common],
                        help="write a gnuplot script for one experiment CSV")
    gp.add_argument("experiment", choices=sorted(COMMAND_SWEEP))
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg = cfg.with_overrides(seed=args.seed, frames=args.frames, out=args.out)
    validate_config(cfg, source=args.config)
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    def say(msg):
        if not args.quiet:
            print(msg)

    try:
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        cfg = _load(args)
        out = Path(cfg.out)
        if args.command == "gnuplot-script":
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"{args.experiment}.gp"
            path.write_text(gnuplot_script(args.experiment), encoding="utf-8")
            say(f"wrote {path}")
            return EXIT_OK
        if args.command == "validate":
            summary = run_validation(cfg, workers=args.workers)
            paths = write_validation(summary, out)
            say(format_report(summary).rstrip())
            for pth in paths:
                say(f"wrote {pth}")
            return EXIT_VALIDATION if summary["failed"] else EXIT_OK
        for pth in run_experiment(cfg, args.command, out, workers=args.workers):
            say(f"wrote {pth}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, DegenerateInputError, ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
