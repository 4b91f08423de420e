"""Monte Carlo experiment runner, CSV/plot emission, and the command line.

A run sweeps (epsilon, sigma_d) noise points, simulating `trials`
independent target layouts per point and recording both estimators'
errors.  Target positions depend only on the master seed and the trial
index, so every sweep point sees the same layouts and the comparison is
paired.  All randomness flows through named substreams, which makes the
output byte-identical for any worker count.

Subcommands: simulate, single-trial, calibrate-rho, plot.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .kernel import MissingFieldError, ZeroEdgeError
from .netgeom import NetworkLayout, enumerate_edges
from .noise import (NoiseParams, RngStream, TrialRng, ZeroDistanceError,
                    calibrate_rho)
from .solver import (DegenerateGaugeError, DegenerateReferenceError,
                     RankDeficientError, SingularSystemError,
                     scenario1_pipeline, scenario2_pipeline)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class EmptyDatasetError(ValueError):
    """Dataset lacks the sweep points a plot needs."""


DEFAULT_ANCHORS = ((0.0, 0.0, 10.0), (30.0, 0.0, 10.0), (30.0, 30.0, 10.0),
                   (0.0, 30.0, 10.0), (0.0, 0.0, 0.0))
DEFAULT_ROOM = (30.0, 30.0, 10.0)
DEFAULT_SIGMA_GRID = tuple(round(0.2 * k, 10) for k in range(1, 16))
DEFAULT_EPSILON_GRID = (10.0, 20.0, 30.0, 40.0, 50.0)
DEFAULT_TRIALS = 500
DEFAULT_SEED = 12345

# a sweep point is dropped from summaries when more trials than this fail
FAIL_FRACTION_MAX = 0.01

_FAILURE_KINDS = (RankDeficientError, DegenerateGaugeError, SingularSystemError,
                  DegenerateReferenceError, ZeroEdgeError, MissingFieldError,
                  ZeroDistanceError)

TRIAL_COLUMNS = ("scenario", "epsilon_deg", "sigma_d", "trial", "ok", "reason",
                 "xi_smds", "xi_qdsmds", "smds_gauge_residual",
                 "qd_gauge_residual", "qd_k_residual", "smds_eig4_ratio",
                 "qd_sv2_ratio")

SUMMARY_COLUMNS = ("scenario", "epsilon_deg", "sigma_d", "n_trials", "n_failed",
                   "excluded", "mean_xi_smds", "std_xi_smds",
                   "mean_xi_qdsmds", "std_xi_qdsmds")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one simulation run depends on."""

    scenario: int = 1
    sigma_d: tuple = DEFAULT_SIGMA_GRID
    epsilon_deg: tuple = DEFAULT_EPSILON_GRID
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    workers: int = 1
    procrustes: bool = False
    distance_redraw_per_pair: bool = False
    anchors: tuple = DEFAULT_ANCHORS
    n_targets: int = 15
    room: tuple = DEFAULT_ROOM

    def validate(self) -> None:
        if self.scenario not in (1, 2):
            raise ConfigError(f"scenario must be 1 or 2, got {self.scenario}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not self.sigma_d or any(s < 0 for s in self.sigma_d):
            raise ConfigError("sigma_d values must be nonnegative")
        if not self.epsilon_deg or any(not (0 <= e < 162) for e in self.epsilon_deg):
            raise ConfigError("epsilon values must lie in [0, 162) degrees")
        if self.n_targets < 1:
            raise ConfigError("n_targets must be at least 1")
        if len(self.room) != 3 or any(r <= 0 for r in self.room):
            raise ConfigError("room must be three positive extents")
        anchors = np.asarray(self.anchors, dtype=float)
        if anchors.ndim != 2 or anchors.shape[1] != 3 or len(anchors) < 4:
            raise ConfigError("anchors must be at least 4 rows of 3 coordinates")

    @property
    def anchor_array(self) -> np.ndarray:
        return np.asarray(self.anchors, dtype=float)


@dataclass
class TrialRecord:
    scenario: int
    epsilon_deg: float
    sigma_d: float
    trial: int
    ok: bool
    reason: str = ""
    xi_smds: Optional[float] = None
    xi_qdsmds: Optional[float] = None
    smds_gauge_residual: Optional[float] = None
    qd_gauge_residual: Optional[float] = None
    qd_k_residual: Optional[float] = None
    smds_eig4_ratio: Optional[float] = None
    qd_sv2_ratio: Optional[float] = None


def sample_targets(seed: int, trial: int, n_targets: int, room) -> np.ndarray:
    """Uniform target positions inside the room for one trial.

    Keyed by trial only, so every sweep point reuses the same layouts.
    """
    gen = RngStream.for_purpose(seed, "targets", trial).generator()
    return gen.uniform(0.0, np.asarray(room, dtype=float), size=(n_targets, 3))


def _stream_key(value: float) -> int:
    # derive substream keys from parameter values so reordering a sweep
    # list never changes any trial's draws
    return int(round(value * 1e6)) & 0xFFFFFFFF


def run_trial(config: ExperimentConfig, noise: NoiseParams, trial: int) -> TrialRecord:
    """Simulate one trial at one sweep point."""
    targets = sample_targets(config.seed, trial, config.n_targets, config.room)
    layout = NetworkLayout(config.anchor_array, targets)
    rng = TrialRng(config.seed, ("noise", _stream_key(noise.epsilon_deg),
                                 _stream_key(noise.sigma_d), trial))
    pipeline = scenario1_pipeline if config.scenario == 1 else scenario2_pipeline
    record = TrialRecord(config.scenario, noise.epsilon_deg, noise.sigma_d,
                         trial, ok=False)
    try:
        outcome = pipeline(layout, noise, rng,
                           distance_redraw_per_pair=config.distance_redraw_per_pair,
                           procrustes=config.procrustes,
                           edges=enumerate_edges(layout.n_anchors, layout.n_targets))
    except _FAILURE_KINDS as exc:
        record.reason = type(exc).__name__
        return record
    smds, qd = outcome.smds, outcome.qdsmds
    record.ok = True
    record.xi_smds = smds.xi
    record.xi_qdsmds = qd.xi
    record.smds_gauge_residual = smds.gauge_residual
    record.qd_gauge_residual = qd.gauge_residual
    record.qd_k_residual = qd.k_residual
    record.smds_eig4_ratio = float(smds.spectrum[3] / smds.spectrum[0])
    record.qd_sv2_ratio = float(qd.spectrum[1] / qd.spectrum[0])
    return record


def _run_block(payload):
    config, noise, lo, hi = payload
    return [run_trial(config, noise, t) for t in range(lo, hi)]


@dataclass(frozen=True)
class SummaryRow:
    scenario: int
    epsilon_deg: float
    sigma_d: float
    n_trials: int
    n_failed: int
    excluded: bool
    mean_xi_smds: Optional[float]
    std_xi_smds: Optional[float]
    mean_xi_qdsmds: Optional[float]
    std_xi_qdsmds: Optional[float]


def summarize(records) -> list:
    """Per-sweep-point means over successful trials, in sorted point order."""
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.scenario, rec.epsilon_deg, rec.sigma_d), []).append(rec)
    rows = []
    for key in sorted(groups):
        scenario, eps, sigma = key
        recs = groups[key]
        ok = [r for r in recs if r.ok]
        n_failed = len(recs) - len(ok)
        excluded = n_failed > FAIL_FRACTION_MAX * len(recs)
        mean_s = std_s = mean_q = std_q = None
        if ok:
            xs = np.array([r.xi_smds for r in ok])
            xq = np.array([r.xi_qdsmds for r in ok])
            mean_s, mean_q = float(xs.mean()), float(xq.mean())
            if len(ok) > 1:
                std_s, std_q = float(xs.std(ddof=1)), float(xq.std(ddof=1))
        rows.append(SummaryRow(scenario, eps, sigma, len(recs), n_failed,
                               excluded, mean_s, std_s, mean_q, std_q))
    return rows


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    summary: list


def run_experiment(config: ExperimentConfig,
                   out_dir: Optional[str] = None) -> ExperimentResult:
    """Run the full sweep; optionally write trials.csv and summary.csv."""
    config.validate()
    noise_points = [NoiseParams.from_epsilon(sig, eps)
                    for eps in config.epsilon_deg for sig in config.sigma_d]
    block = max(1, math.ceil(config.trials / max(config.workers, 1) / 4))
    tasks = [(config, noise, lo, min(lo + block, config.trials))
             for noise in noise_points
             for lo in range(0, config.trials, block)]
    if config.workers == 1:
        blocks = map(_run_block, tasks)
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            blocks = list(pool.map(_run_block, tasks, chunksize=1))
    records = [rec for chunk in blocks for rec in chunk]
    records.sort(key=lambda r: (r.scenario, r.epsilon_deg, r.sigma_d, r.trial))
    result = ExperimentResult(config, records, summarize(records))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_trials_csv(records, out / "trials.csv")
        write_summary_csv(result.summary, out / "summary.csv")
    return result


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trials_csv(records, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRIAL_COLUMNS)
        for rec in records:
            writer.writerow([_cell(getattr(rec, col)) for col in TRIAL_COLUMNS])


def write_summary_csv(summary, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in summary:
            writer.writerow([_cell(getattr(row, col)) for col in SUMMARY_COLUMNS])


def read_trials_csv(path) -> list:
    """Load trial records back from trials.csv."""
    records = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or tuple(reader.fieldnames) != TRIAL_COLUMNS:
            raise EmptyDatasetError(f"{path} is not a trials dataset")
        for row in reader:
            records.append(TrialRecord(
                scenario=int(row["scenario"]),
                epsilon_deg=float(row["epsilon_deg"]),
                sigma_d=float(row["sigma_d"]),
                trial=int(row["trial"]),
                ok=row["ok"] == "1",
                reason=row["reason"],
                **{col: (float(row[col]) if row[col] else None)
                   for col in TRIAL_COLUMNS[6:]},
            ))
    return records


def emit_plots(records, out_dir) -> list:
    """Mean-error curves per (scenario, epsilon) group, one SVG each.

    Returns the written file paths.  Points excluded by the failure rule
    are skipped; a group needs at least two plottable sweep points.
    """
    import matplotlib
    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "qdsmds"
    summary = summarize(records)
    groups: dict = {}
    for row in summary:
        if row.excluded or row.mean_xi_smds is None:
            continue
        groups.setdefault((row.scenario, row.epsilon_deg), []).append(row)
    groups = {k: v for k, v in groups.items() if len(v) >= 2}
    if not groups:
        raise EmptyDatasetError("need at least two plottable sweep points")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for (scenario, eps), rows in sorted(groups.items()):
        rows.sort(key=lambda r: r.sigma_d)
        sig = [r.sigma_d for r in rows]
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot(sig, [r.mean_xi_smds for r in rows], "o-", label="SMDS")
        ax.plot(sig, [r.mean_xi_qdsmds for r in rows], "s-", label="QD-SMDS")
        ax.set_xlabel("distance noise sigma_d [m]")
        ax.set_ylabel("mean positioning error [m]")
        ax.set_title(f"Scenario {scenario}, epsilon = {eps:g} deg")
        ax.grid(True, alpha=0.4)
        ax.legend()
        fig.tight_layout()
        name = f"scenario{scenario}_eps{eps:g}.svg"
        fig.savefig(out / name, format="svg", metadata={"Date": None})
        plt.close(fig)
        paths.append(str(out / name))
    return paths


# --- configuration file and command line -------------------------------

_LIST_KEYS = {"sigma_d", "epsilon_deg"}
_INT_KEYS = {"scenario", "trials", "seed", "workers", "n_targets"}
_BOOL_KEYS = {"procrustes", "distance_redraw_per_pair"}


def _parse_floats(text: str, key: str):
    parts = text.replace(",", " ").split()
    if not parts:
        raise ConfigError(f"{key} needs at least one value")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad float in {key}: {exc}") from exc


def _parse_bool(text: str, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {text!r}")


def load_config(path) -> ExperimentConfig:
    """Read a flat key = value config file."""
    overrides = {}
    with open(path) as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key in _LIST_KEYS:
                overrides[key] = _parse_floats(value, key)
            elif key in _INT_KEYS:
                try:
                    overrides[key] = int(value)
                except ValueError as exc:
                    raise ConfigError(f"{key} must be an integer") from exc
            elif key in _BOOL_KEYS:
                overrides[key] = _parse_bool(value, key)
            elif key == "room":
                room = _parse_floats(value, key)
                if len(room) != 3:
                    raise ConfigError("room needs exactly three extents")
                overrides[key] = room
            elif key == "anchors":
                rows = [r for r in (part.strip() for part in value.split(";")) if r]
                anchors = tuple(_parse_floats(r, "anchors") for r in rows)
                if any(len(a) != 3 for a in anchors):
                    raise ConfigError("each anchor needs three coordinates")
                overrides[key] = anchors
            else:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return replace(ExperimentConfig(), **overrides)


def _config_from_args(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    updates = {}
    if args.scenario is not None:
        updates["scenario"] = args.scenario
    if args.sigma_d is not None:
        updates["sigma_d"] = _parse_floats(args.sigma_d, "sigma_d")
    if args.epsilon is not None:
        updates["epsilon_deg"] = _parse_floats(args.epsilon, "epsilon")
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.seed is not None:
        updates["seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        updates["workers"] = args.workers
    if args.procrustes:
        updates["procrustes"] = True
    if args.distance_redraw_per_pair:
        updates["distance_redraw_per_pair"] = True
    config = replace(config, **updates)
    config.validate()
    return config


def _add_common_options(parser) -> None:
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--scenario", type=int, choices=(1, 2))
    parser.add_argument("--sigma-d", dest="sigma_d",
                        help="comma separated distance noise levels [m]")
    parser.add_argument("--epsilon",
                        help="comma separated angle concentration levels [deg]")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--procrustes", action="store_true",
                        help="final similarity alignment onto the anchors")
    parser.add_argument("--distance-redraw-per-pair", action="store_true",
                        help="redraw edge distances independently per pair")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qdsmds",
        description="Monte Carlo comparison of real and quaternion-domain "
                    "super-MDS localization.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a full noise sweep")
    _add_common_options(sim)
    sim.add_argument("--workers", type=int)
    sim.add_argument("--out", default="results", help="output directory")
    sim.add_argument("--plots", action="store_true",
                     help="also write SVG mean-error curves")

    single = sub.add_parser("single-trial", help="run and report one trial")
    _add_common_options(single)
    single.add_argument("--trial", type=int, default=0)

    cal = sub.add_parser("calibrate-rho",
                         help="concentration rho for given epsilon [deg]")
    cal.add_argument("epsilon", nargs="+", type=float)

    plot = sub.add_parser("plot", help="plot curves from an existing dataset")
    plot.add_argument("--data", required=True, help="trials.csv path")
    plot.add_argument("--out", default="results", help="output directory")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "single-trial":
            return _cmd_single_trial(args)
        if args.command == "calibrate-rho":
            return _cmd_calibrate(args)
        return _cmd_plot(args)
    except (ConfigError, EmptyDatasetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _cmd_simulate(args) -> int:
    config = _config_from_args(args)
    result = run_experiment(config, out_dir=args.out)
    n_failed = sum(not r.ok for r in result.records)
    print(f"wrote {len(result.records)} trials "
          f"({n_failed} failed) to {args.out}/trials.csv")
    if args.plots:
        for path in emit_plots(result.records, args.out):
            print(f"wrote {path}")
    return 0


def _cmd_single_trial(args) -> int:
    config = _config_from_args(args)
    if len(config.sigma_d) != 1 or len(config.epsilon_deg) != 1:
        raise ConfigError("single-trial needs exactly one sigma-d and one epsilon")
    noise = NoiseParams.from_epsilon(config.sigma_d[0], config.epsilon_deg[0])
    record = run_trial(config, noise, args.trial)
    print(f"scenario {record.scenario}  epsilon {record.epsilon_deg:g} deg  "
          f"sigma_d {record.sigma_d:g} m  trial {record.trial}")
    if not record.ok:
        print(f"failed: {record.reason}")
        return 1
    print(f"xi SMDS    {record.xi_smds:.6f} m")
    print(f"xi QD-SMDS {record.xi_qdsmds:.6f} m")
    print(f"gauge residual SMDS {record.smds_gauge_residual:.3e}  "
          f"QD {record.qd_gauge_residual:.3e}")
    print(f"QD k-component energy fraction {record.qd_k_residual:.3e}")
    print(f"spectrum ratios: real eig4/eig1 {record.smds_eig4_ratio:.3e}  "
          f"quat sv2/sv1 {record.qd_sv2_ratio:.3e}")
    return 0


def _cmd_calibrate(args) -> int:
    for eps in args.epsilon:
        print(f"epsilon {eps:g} deg -> rho {calibrate_rho(eps)!r}")
    return 0


def _cmd_plot(args) -> int:
    records = read_trials_csv(args.data)
    for path in emit_plots(records, args.out):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
