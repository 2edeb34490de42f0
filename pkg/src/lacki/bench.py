"""Regression benchmark harness.

Runs repeated randomized trials of the interpolation rule against two fixed
1-D/2-D-flavoured targets and an affine least-squares baseline, recording
RMS error, max error and training/prediction wall-clock times.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .core import Dataset, KiConfig, fit

__all__ = [
    "target_f1",
    "target_f2",
    "ExperimentSpec",
    "MetricBundle",
    "LinearModel",
    "linear_baseline_fit",
    "run_experiment",
    "run_dimension_sweep",
]


def target_f1(x: np.ndarray) -> np.ndarray:
    """|cos(2 pi x1)| + x1 on [0,1]^d (only the first coordinate matters)."""
    x = np.atleast_2d(x)
    return np.abs(np.cos(2.0 * np.pi * x[:, 0])) + x[:, 0]


def target_f2(x: np.ndarray) -> np.ndarray:
    """sin(x1) sin(x2) + 0.05 (sin(5 x1) sin(5 x2))^3."""
    x = np.atleast_2d(x)
    return np.sin(x[:, 0]) * np.sin(x[:, 1]) + 0.05 * (
        np.sin(5.0 * x[:, 0]) * np.sin(5.0 * x[:, 1])
    ) ** 3


_TARGETS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "f1": target_f1,
    "f2": target_f2,
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One benchmark configuration: target, sizes, noise and learner setup."""

    target: str = "f1"
    d: int = 1
    n_train: int = 500
    noise_halfwidth: float = 0.0
    n_test: int = 25000
    n_repeats: int = 30
    learner: KiConfig = field(default_factory=KiConfig)
    seed: int = 0
    custom_target: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def target_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        if self.target == "custom":
            if self.custom_target is None:
                raise ValueError("custom target selected but none supplied")
            return self.custom_target
        try:
            return _TARGETS[self.target]
        except KeyError:
            raise ValueError(f"unknown target {self.target!r}") from None

    def __post_init__(self):
        if self.target != "custom" and self.target not in _TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.d < 1 or self.n_train < 1 or self.n_test < 1 or self.n_repeats < 1:
            raise ValueError("sizes must be positive")
        if self.target == "f2" and self.d < 2:
            raise ValueError("f2 needs at least 2 input dimensions")


@dataclass
class MetricBundle:
    """Per-repeat metric arrays with mean/std summaries.

    rms     root of the mean squared prediction error on the test inputs
    me      max prediction error on the test inputs
    log_tt  log training seconds
    log_pt  log (prediction seconds / number of test inputs)
    """

    rms: np.ndarray
    me: np.ndarray
    log_tt: np.ndarray
    log_pt: np.ndarray

    def summary(self) -> dict:
        out = {}
        for name in ("rms", "me", "log_tt", "log_pt"):
            v = getattr(self, name)
            out[f"{name}_mean"] = float(np.mean(v))
            out[f"{name}_std"] = float(np.std(v))
        return out


@dataclass
class LinearModel:
    """Affine least-squares model y = intercept + coef . x (single output)."""

    coef: np.ndarray
    intercept: float

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.atleast_2d(x) @ self.coef + self.intercept


def linear_baseline_fit(data: Dataset) -> LinearModel:
    """Least-squares affine fit; rank-deficient systems get the minimum-norm
    solution, so a single point yields the constant model through it."""
    a = np.hstack([np.ones((data.n, 1)), data.inputs])
    coef, *_ = np.linalg.lstsq(a, data.observations[:, 0], rcond=None)
    return LinearModel(coef=coef[1:], intercept=float(coef[0]))


def _median_of_three(fn: Callable[[], float]) -> float:
    return float(np.median([fn() for _ in range(3)]))


def run_experiment(spec: ExperimentSpec) -> Dict[str, MetricBundle]:
    """Repeated trials: draw uniform train inputs, add uniform noise, fit,
    score on fresh uniform test inputs.

    Returns bundles keyed by learner name: "lacki" and "linear".
    """
    target = spec.target_fn()
    streams = np.random.SeedSequence(spec.seed).spawn(spec.n_repeats)
    results: Dict[str, dict] = {
        name: {"rms": [], "me": [], "log_tt": [], "log_pt": []}
        for name in ("lacki", "linear")
    }

    for ss in streams:
        rng = np.random.default_rng(ss)
        x_train = rng.uniform(0.0, 1.0, size=(spec.n_train, spec.d))
        y_clean = target(x_train)
        noise = (
            rng.uniform(-spec.noise_halfwidth, spec.noise_halfwidth, size=spec.n_train)
            if spec.noise_halfwidth > 0
            else np.zeros(spec.n_train)
        )
        data = Dataset(x_train, (y_clean + noise)[:, None])
        x_test = rng.uniform(0.0, 1.0, size=(spec.n_test, spec.d))
        y_test = target(x_test)

        # interpolation learner
        t0 = time.perf_counter()
        state = fit(data, spec.learner)
        tt = time.perf_counter() - t0
        tt = min(tt, _median_of_three(lambda: _timed_fit(data, spec.learner)))
        t0 = time.perf_counter()
        pred = state.predict_batch(x_test).value[:, 0]
        pt = time.perf_counter() - t0
        err = np.abs(pred - y_test)
        results["lacki"]["rms"].append(math.sqrt(float(np.mean(err**2))))
        results["lacki"]["me"].append(float(err.max()))
        results["lacki"]["log_tt"].append(math.log(max(tt, 1e-12)))
        results["lacki"]["log_pt"].append(math.log(max(pt / spec.n_test, 1e-15)))

        # affine baseline
        t0 = time.perf_counter()
        lin = linear_baseline_fit(data)
        tt = time.perf_counter() - t0
        t0 = time.perf_counter()
        pred = lin.predict(x_test)
        pt = time.perf_counter() - t0
        err = np.abs(pred - y_test)
        results["linear"]["rms"].append(math.sqrt(float(np.mean(err**2))))
        results["linear"]["me"].append(float(err.max()))
        results["linear"]["log_tt"].append(math.log(max(tt, 1e-12)))
        results["linear"]["log_pt"].append(math.log(max(pt / spec.n_test, 1e-15)))

    return {
        name: MetricBundle(**{k: np.array(v) for k, v in vals.items()})
        for name, vals in results.items()
    }


def _timed_fit(data: Dataset, config: KiConfig) -> float:
    t0 = time.perf_counter()
    fit(data, config)
    return time.perf_counter() - t0


def run_dimension_sweep(
    base: ExperimentSpec, dims: Sequence[int]
) -> List[Dict[str, object]]:
    """One experiment per input dimension at fixed training size; returns a
    table of flat rows (one per dimension per learner)."""
    rows: List[Dict[str, object]] = []
    for d in dims:
        spec = replace(base, d=d)
        bundles = run_experiment(spec)
        for name, bundle in bundles.items():
            row: Dict[str, object] = {"d": d, "learner": name}
            row.update(bundle.summary())
            rows.append(row)
    return rows
