"""Command-line frontend.

Subcommands: fit, predict, bench, simulate, campaign, bounds, complexity.
Datasets are headered CSV (``x_1..x_d,y_1..y_m``); fitted models are JSON
with an explicit version tag; every artifact is deterministic for a fixed
config and seed (no timestamps in payloads).

Exit codes: 0 success, 2 user/validation error, 3 I/O error, 4 numeric
failure (divergence or undefined prediction).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .bench import ExperimentSpec, run_dimension_sweep, run_experiment
from .core import (
    Dataset,
    DimensionMismatchError,
    InputMetric,
    KiConfig,
    LackiState,
    PredictionUndefinedError,
    fit,
)
from .guarantees import assemble_error_system, bound_report, sample_complexity
from .mrac import CampaignRandomization, MracConfig, run_campaign, run_trial

MODEL_VERSION = "lacki-model-v1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

_QUANTILE_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)


class CliError(Exception):
    """User-facing failure carrying its exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# config plumbing


def _strict_keys(doc: dict, allowed: Sequence[str], where: str) -> None:
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise CliError(EXIT_USAGE, f"unknown config key(s) in {where}: {', '.join(unknown)}")


def _load_json(path: str, what: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {what} {path!r}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"malformed JSON in {what} {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError(EXIT_USAGE, f"{what} {path!r} must be a JSON object")
    return doc


def _ki_config_from_dict(doc: dict, where: str = "learner config") -> KiConfig:
    _strict_keys(
        doc,
        ["alpha", "lam", "l_floor", "e_bar", "lower_bound", "upper_bound", "metric"],
        where,
    )
    kwargs = dict(doc)
    metric_doc = kwargs.pop("metric", None)
    if metric_doc is not None:
        _strict_keys(metric_doc, ["kind", "weights"], f"{where}.metric")
        weights = metric_doc.get("weights")
        kwargs["metric"] = InputMetric(
            kind=metric_doc.get("kind", "max"),
            weights=None if weights is None else np.asarray(weights, dtype=float),
        )
    for key in ("lower_bound", "upper_bound"):
        if kwargs.get(key) is not None:
            kwargs[key] = np.asarray(kwargs[key], dtype=float)
    try:
        return KiConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"invalid {where}: {exc}") from exc


def _ki_config_to_dict(config: KiConfig) -> dict:
    doc: dict = {
        "alpha": config.alpha,
        "lam": config.lam,
        "l_floor": config.l_floor,
        "e_bar": config.e_bar,
        "lower_bound": None
        if config.lower_bound is None
        else np.atleast_1d(np.asarray(config.lower_bound, dtype=float)).tolist(),
        "upper_bound": None
        if config.upper_bound is None
        else np.atleast_1d(np.asarray(config.upper_bound, dtype=float)).tolist(),
        "metric": {
            "kind": config.metric.kind,
            "weights": None if config.metric.weights is None else config.metric.weights.tolist(),
        },
    }
    return doc


def _mrac_config_from_dict(doc: dict, seed_override: Optional[int]) -> MracConfig:
    _strict_keys(
        doc,
        [
            "k1", "k2", "delta", "t0", "tf", "x0", "xi0", "w_scale", "obs_noise",
            "learner", "seed", "adaptive", "omega_n", "zeta", "command",
            "command_amplitude", "command_period",
        ],
        "simulation config",
    )
    kwargs = dict(doc)
    learner_doc = kwargs.pop("learner", None)
    if learner_doc is not None:
        kwargs["learner"] = _ki_config_from_dict(learner_doc)
    for key in ("x0", "xi0"):
        if key in kwargs:
            v = kwargs[key]
            if not (isinstance(v, (list, tuple)) and len(v) == 2):
                raise CliError(EXIT_USAGE, f"{key} must be a 2-element list")
            kwargs[key] = (float(v[0]), float(v[1]))
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        return MracConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"invalid simulation config: {exc}") from exc


# ---------------------------------------------------------------------------
# CSV plumbing


def _read_dataset_csv(path: str) -> Dataset:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read dataset {path!r}: {exc}") from exc
    if not rows:
        raise CliError(EXIT_USAGE, f"dataset {path!r} is empty (missing header)")
    header = [h.strip() for h in rows[0]]
    d = sum(1 for h in header if h.startswith("x_"))
    m = sum(1 for h in header if h.startswith("y_"))
    expected = [f"x_{i}" for i in range(1, d + 1)] + [f"y_{j}" for j in range(1, m + 1)]
    if d < 1 or m < 1 or header != expected:
        raise CliError(
            EXIT_USAGE,
            f"dataset {path!r} header must be x_1..x_d,y_1..y_m, got {','.join(header)}",
        )
    data = np.empty((len(rows) - 1, d + m))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != d + m:
            raise CliError(EXIT_USAGE, f"{path!r} row {r}: expected {d + m} cells, got {len(row)}")
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError as exc:
                raise CliError(
                    EXIT_USAGE, f"{path!r} row {r}, column {header[c]}: not a number: {cell!r}"
                ) from exc
            if not math.isfinite(v):
                raise CliError(EXIT_USAGE, f"{path!r} row {r}, column {header[c]}: non-finite value {cell!r}")
            data[r - 2, c] = v
    return Dataset(data[:, :d].reshape(-1, d), data[:, d:].reshape(-1, m))


def _read_query_csv(path: str, d: int) -> np.ndarray:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read queries {path!r}: {exc}") from exc
    if not rows:
        raise CliError(EXIT_USAGE, f"query file {path!r} is empty (missing header)")
    header = [h.strip() for h in rows[0]]
    if header != [f"x_{i}" for i in range(1, d + 1)]:
        raise CliError(
            EXIT_USAGE,
            f"query header must be x_1..x_{d} to match the model, got {','.join(header)}",
        )
    out = np.empty((len(rows) - 1, d))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != d:
            raise CliError(EXIT_USAGE, f"{path!r} row {r}: expected {d} cells, got {len(row)}")
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError as exc:
                raise CliError(
                    EXIT_USAGE, f"{path!r} row {r}, column {header[c]}: not a number: {cell!r}"
                ) from exc
            if not math.isfinite(v):
                raise CliError(EXIT_USAGE, f"{path!r} row {r}, column {header[c]}: non-finite value {cell!r}")
            out[r - 2, c] = v
    return out


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_json(path: Path, doc: dict) -> None:
    try:
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _write_plot_data(path: Path, xs, ys) -> None:
    """Two whitespace-separated columns; consumable by any plotting tool."""
    lines = [f"{_fmt(x)} {_fmt(y)}" for x, y in zip(xs, ys)]
    try:
        path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _quantile_plot(path: Path, values: np.ndarray) -> None:
    qs = np.quantile(np.asarray(values, dtype=float), _QUANTILE_LEVELS)
    _write_plot_data(path, _QUANTILE_LEVELS, qs)


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create output directory {out}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# model serialization


def save_model(state: LackiState, path: Path) -> None:
    doc = {
        "version": MODEL_VERSION,
        "config": _ki_config_to_dict(state.config),
        "data": {
            "inputs": state.data.inputs.tolist(),
            "observations": state.data.observations.tolist(),
            "d": state.d,
            "m": state.m,
        },
        "ell": state.ell,
    }
    _write_json(path, doc)


def load_model(path: str) -> LackiState:
    doc = _load_json(path, "model")
    _strict_keys(doc, ["version", "config", "data", "ell"], "model")
    if doc.get("version") != MODEL_VERSION:
        raise CliError(EXIT_USAGE, f"unsupported model version: {doc.get('version')!r}")
    config = _ki_config_from_dict(doc["config"], "model config")
    data_doc = doc["data"]
    _strict_keys(data_doc, ["inputs", "observations", "d", "m"], "model data")
    d, m = int(data_doc["d"]), int(data_doc["m"])
    inputs = np.asarray(data_doc["inputs"], dtype=float).reshape(-1, d)
    observations = np.asarray(data_doc["observations"], dtype=float).reshape(-1, m)
    state = LackiState(config, Dataset(inputs, observations))
    stored_ell = float(doc["ell"])
    if not math.isclose(state.ell, stored_ell, rel_tol=1e-9, abs_tol=1e-12):
        raise CliError(EXIT_USAGE, f"model constant {stored_ell} inconsistent with its data")
    state.ell = stored_ell
    return state


# ---------------------------------------------------------------------------
# subcommands


def cmd_fit(args) -> int:
    config = (
        _ki_config_from_dict(_load_json(args.config, "config"), "config")
        if args.config
        else KiConfig()
    )
    data = _read_dataset_csv(args.dataset)
    state = fit(data, config)
    out = _out_dir(args)
    save_model(state, out / "model.json")
    print(f"ell={state.ell!r} n={state.n} d={state.d} m={state.m}")
    print(f"model written to {out / 'model.json'}")
    return EXIT_OK


def cmd_predict(args) -> int:
    state = load_model(args.model)
    queries = _read_query_csv(args.queries, state.d)
    try:
        pred = state.predict_batch(queries)
    except PredictionUndefinedError as exc:
        raise CliError(EXIT_NUMERIC, str(exc)) from exc
    except DimensionMismatchError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    out = _out_dir(args)
    header = (
        [f"x_{i}" for i in range(1, state.d + 1)]
        + [f"value_{j}" for j in range(1, state.m + 1)]
        + [f"halfwidth_{j}" for j in range(1, state.m + 1)]
    )
    rows = np.hstack([queries, pred.value, pred.halfwidth]) if len(queries) else []
    _write_csv(out / "predictions.csv", header, rows)
    print(f"{len(queries)} predictions written to {out / 'predictions.csv'}")
    return EXIT_OK


def _bench_spec_from_config(doc: dict, seed_override: Optional[int]) -> ExperimentSpec:
    _strict_keys(
        doc,
        ["target", "d", "n_train", "noise_halfwidth", "n_test", "n_repeats", "learner", "seed", "dims"],
        "bench config",
    )
    kwargs = {k: v for k, v in doc.items() if k != "dims"}
    learner_doc = kwargs.pop("learner", None)
    if learner_doc is not None:
        kwargs["learner"] = _ki_config_from_dict(learner_doc)
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        return ExperimentSpec(**kwargs)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"invalid bench config: {exc}") from exc


def cmd_bench(args) -> int:
    doc = _load_json(args.config, "config") if args.config else {}
    spec = _bench_spec_from_config(doc, args.seed)
    out = _out_dir(args)
    dims = doc.get("dims")
    if dims is not None:
        rows = run_dimension_sweep(spec, [int(d) for d in dims])
        # accuracy fields are deterministic; wall-clock fields go to their
        # own artifact so the main CSV is byte-stable across runs
        acc = ["d", "learner", "me_mean", "me_std", "rms_mean", "rms_std"]
        tim = ["d", "learner", "log_pt_mean", "log_pt_std", "log_tt_mean", "log_tt_std"]
        _write_csv(out / "bench_sweep.csv", acc, ([r.get(k) for k in acc] for r in rows))
        _write_csv(out / "bench_sweep_timings.csv", tim, ([r.get(k) for k in tim] for r in rows))
        for learner in ("lacki", "linear"):
            pts = [(r["d"], r["rms_mean"]) for r in rows if r["learner"] == learner]
            _write_plot_data(
                out / f"bench_rms_vs_d_{learner}.dat", [p[0] for p in pts], [p[1] for p in pts]
            )
        print(f"dimension sweep over d={list(dims)} written to {out}")
        return EXIT_OK
    bundles = run_experiment(spec)
    table = []
    timings = []
    for learner, bundle in sorted(bundles.items()):
        for i in range(len(bundle.rms)):
            table.append((i, learner, bundle.rms[i], bundle.me[i]))
            timings.append((i, learner, bundle.log_tt[i], bundle.log_pt[i]))
        for metric in ("rms", "me"):
            _quantile_plot(out / f"bench_{learner}_{metric}_quantiles.dat", getattr(bundle, metric))
        for metric in ("log_tt", "log_pt"):
            _quantile_plot(
                out / f"bench_timings_{learner}_{metric}_quantiles.dat", getattr(bundle, metric)
            )
    _write_csv(out / "bench_results.csv", ["repeat", "learner", "rms", "me"], table)
    _write_csv(out / "bench_timings.csv", ["repeat", "learner", "log_tt", "log_pt"], timings)
    summary = {}
    timing_summary = {}
    for learner, bundle in bundles.items():
        stats = bundle.summary()
        summary[learner] = {k: v for k, v in stats.items() if not k.startswith("log_")}
        timing_summary[learner] = {k: v for k, v in stats.items() if k.startswith("log_")}
    summary["spec"] = {
        "target": spec.target, "d": spec.d, "n_train": spec.n_train,
        "noise_halfwidth": spec.noise_halfwidth, "n_test": spec.n_test,
        "n_repeats": spec.n_repeats, "seed": spec.seed,
    }
    _write_json(out / "bench_summary.json", summary)
    _write_json(out / "bench_timings.json", timing_summary)
    print(f"{spec.n_repeats} repeats on {spec.target} (d={spec.d}) written to {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    doc = _load_json(args.config, "config") if args.config else {}
    config = _mrac_config_from_dict(doc, args.seed)
    config = replace(config, record_trajectory=True)
    record = run_trial(config)
    if record.diverged:
        raise CliError(EXIT_NUMERIC, f"simulation diverged after {record.n_steps} steps")
    out = _out_dir(args)
    _write_csv(out / "simulate_trajectory.csv", record.trajectory_columns, record.trajectory)
    times = config.t0 + config.delta * np.arange(record.n_steps)
    _write_plot_data(out / "simulate_err_vs_t.dat", times, record.err_inf)
    _write_plot_data(out / "simulate_prederr_vs_t.dat", times, record.pred_err)
    _write_json(
        out / "simulate_metrics.json",
        {
            "log_xerr": record.log_xerr,
            "log_xdoterr": record.log_xdoterr,
            "log_prederr": record.log_prederr,
            "log_cmd": record.log_cmd,
            "ell_final": record.ell_final,
            "n_steps": record.n_steps,
            "diverged": record.diverged,
        },
    )
    print(
        f"{len(record.trajectory)} trajectory rows written to "
        f"{out / 'simulate_trajectory.csv'} (ell_final={record.ell_final!r})"
    )
    return EXIT_OK


def cmd_campaign(args) -> int:
    doc = _load_json(args.config, "config") if args.config else {}
    _strict_keys(
        doc,
        ["base", "n_trials", "randomization", "include_baseline"],
        "campaign config",
    )
    base = _mrac_config_from_dict(doc.get("base", {}), args.seed)
    n_trials = int(doc.get("n_trials", 50))
    rand_doc = doc.get("randomization", {})
    _strict_keys(rand_doc, ["x0_range", "l_floor_range", "w_scale_range"], "campaign randomization")
    rand = CampaignRandomization(
        **{k: tuple(float(v) for v in vs) for k, vs in rand_doc.items()}
    )
    include_baseline = bool(doc.get("include_baseline", True))
    out = _out_dir(args)

    runs: Dict[str, List] = {"lacki": run_campaign(base, n_trials, rand)}
    if include_baseline:
        runs["pd"] = run_campaign(replace(base, adaptive=False), n_trials, rand)

    metrics = ("log_xerr", "log_xdoterr", "log_prederr", "log_cmd")
    table = []
    summary: dict = {"n_trials": n_trials, "seed": base.seed}
    for learner, records in sorted(runs.items()):
        for i, rec in enumerate(records):
            table.append(
                (i, learner, rec.log_xerr, rec.log_xdoterr, rec.log_prederr,
                 rec.log_cmd, rec.ell_final, int(rec.diverged), rec.n_steps)
            )
        summary[learner] = {
            f"median_{m}": float(np.median([getattr(r, m) for r in records])) for m in metrics
        }
        summary[learner]["n_diverged"] = sum(r.diverged for r in records)
        for m in metrics:
            _quantile_plot(
                out / f"campaign_{learner}_{m}_quantiles.dat",
                np.array([getattr(r, m) for r in records]),
            )
    _write_csv(
        out / "campaign_results.csv",
        ["trial", "learner", "log_xerr", "log_xdoterr", "log_prederr", "log_cmd",
         "ell_final", "diverged", "n_steps"],
        table,
    )
    _write_json(out / "campaign_summary.json", summary)
    print(f"{n_trials} trials per learner ({', '.join(sorted(runs))}) written to {out}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    doc = _load_json(args.config, "config") if args.config else {}
    _strict_keys(
        doc,
        ["m", "delta", "k1", "k2", "innovation_bound", "e0_norm", "n_max"],
        "bounds config",
    )
    m = int(doc.get("m", 1))
    k1 = np.asarray(doc.get("k1", np.eye(m).tolist()), dtype=float)
    k2 = np.asarray(doc.get("k2", np.eye(m).tolist()), dtype=float)
    if k1.ndim == 0:
        k1 = float(k1) * np.eye(m)
    if k2.ndim == 0:
        k2 = float(k2) * np.eye(m)
    try:
        system = assemble_error_system(
            m,
            float(doc.get("delta", 0.005)),
            k1,
            k2,
            float(doc.get("innovation_bound", 1.0)),
        )
        report = bound_report(system, float(doc.get("e0_norm", 0.0)), int(doc.get("n_max", 1000)))
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"invalid bounds config: {exc}") from exc
    out = _out_dir(args)
    _write_json(out / "bounds.json", report.to_dict())
    _write_plot_data(out / "bounds_variant1_vs_n.dat", report.steps, report.variant1)
    if report.variant3 is not None:
        _write_plot_data(out / "bounds_variant3_vs_n.dat", report.steps, report.variant3)
    if report.variant2 is not None:
        mask = np.isfinite(report.variant2)
        _write_plot_data(out / "bounds_variant2_vs_n.dat", report.steps[mask], report.variant2[mask])
    print(
        f"spectral_radius={report.spectral_radius!r} matrix_norm={report.matrix_norm!r}; "
        f"report written to {out / 'bounds.json'}"
    )
    return EXIT_OK


def cmd_complexity(args) -> int:
    try:
        result = sample_complexity(args.epsilon, args.delta, args.l_star, args.d)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    print(f"k={result.k} N={result.n}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser, *, config: bool = True) -> None:
    if config:
        parser.add_argument("--config", help="JSON config file (strict keys)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads (currently 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lacki",
        description="Lipschitz/Hölder interpolation, guarantee calculators, "
        "adaptive-control simulation and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model from a CSV dataset")
    p.add_argument("dataset", help="CSV with header x_1..x_d,y_1..y_m")
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="evaluate a saved model on query points")
    p.add_argument("model", help="model JSON written by `fit`")
    p.add_argument("queries", help="CSV with header x_1..x_d")
    _add_common(p, config=False)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="regression benchmark repeats")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("simulate", help="one adaptive-control trial with trajectory dump")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("campaign", help="randomized batch of adaptive-control trials")
    _add_common(p)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("bounds", help="tracking-error bound report for a gain setup")
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("complexity", help="sample-count calculator")
    p.add_argument("epsilon", type=float)
    p.add_argument("delta", type=float)
    p.add_argument("l_star", type=float)
    p.add_argument("d", type=int)
    p.set_defaults(func=cmd_complexity)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, matching our convention
        return int(exc.code or 0)
    if getattr(args, "threads", 1) is not None and getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (PredictionUndefinedError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
