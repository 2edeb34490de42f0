"""Kinky inference with lazily adapted Hölder constants.

The predictor keeps upper and lower envelopes over the observed data under an
assumed Hölder regularity (constant ``ell``, exponent ``alpha``) and predicts
the midpoint of the two.  The constant is not supplied a priori: it is the
smallest value consistent with the data under a noise allowance ``lam``, and
it is only ever increased as new observations arrive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "PredictionUndefinedError",
    "InputMetric",
    "Dataset",
    "KiConfig",
    "Prediction",
    "LackiState",
    "estimate_constant_batch",
    "fit",
]

# Chunk size for pairwise distance scans; bounds peak memory at roughly
# _CHUNK * N * d floats.
_CHUNK = 512


class DimensionMismatchError(ValueError):
    """Inputs, observations or queries disagree on dimensionality."""


class PredictionUndefinedError(ValueError):
    """Both envelopes are infinite; no finite midpoint exists."""


@dataclass(frozen=True)
class InputMetric:
    """Pseudo-metric on the input space.

    ``kind`` is one of ``"max"`` (default), ``"euclidean"``, or
    ``"weighted_max"``; the latter requires strictly positive per-coordinate
    ``weights``.
    """

    kind: str = "max"
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("max", "euclidean", "weighted_max"):
            raise ValueError(f"unknown metric kind: {self.kind!r}")
        if self.kind == "weighted_max":
            if self.weights is None:
                raise ValueError("weighted_max metric requires weights")
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 1 or np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be a 1-D vector of positive finite values")
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ValueError(f"metric kind {self.kind!r} takes no weights")

    def pairwise(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Distance matrix of shape (len(a), len(b))."""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        b = np.atleast_2d(np.asarray(b, dtype=float))
        diff = np.abs(a[:, None, :] - b[None, :, :])
        if self.kind == "max":
            return diff.max(axis=2)
        if self.kind == "weighted_max":
            return (diff * self.weights).max(axis=2)
        return np.sqrt((diff**2).sum(axis=2))

    def __call__(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(self.pairwise(np.asarray(x)[None, :], np.asarray(y)[None, :])[0, 0])


@dataclass
class Dataset:
    """Paired sample of input vectors in R^d and observed outputs in R^m."""

    inputs: np.ndarray
    observations: np.ndarray

    def __post_init__(self):
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        self.observations = np.atleast_2d(np.asarray(self.observations, dtype=float))
        if len(self.inputs) != len(self.observations):
            raise DimensionMismatchError(
                f"{len(self.inputs)} inputs vs {len(self.observations)} observations"
            )

    @classmethod
    def empty(cls, d: int, m: int) -> "Dataset":
        return cls(np.empty((0, d)), np.empty((0, m)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Sequence[float], Sequence[float]]]) -> "Dataset":
        pairs = list(pairs)
        xs = np.array([np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in pairs])
        ys = np.array([np.atleast_1d(np.asarray(y, dtype=float)) for _, y in pairs])
        return cls(xs, ys)

    @property
    def n(self) -> int:
        return len(self.inputs)

    @property
    def d(self) -> int:
        return self.inputs.shape[1]

    @property
    def m(self) -> int:
        return self.observations.shape[1]


def _as_bound(v, m: int, default: float) -> np.ndarray:
    if v is None:
        return np.full(m, default)
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.shape == (1,) and m > 1:
        arr = np.repeat(arr, m)
    if arr.shape != (m,):
        raise DimensionMismatchError(f"bound has shape {arr.shape}, expected ({m},)")
    return arr


@dataclass(frozen=True)
class KiConfig:
    """Hyperparameters of the inference rule.

    ``alpha``    Hölder exponent in (0, 1].
    ``lam``      noise regularizer; set to twice the observational noise
                 half-width to keep the estimated constant bounded.
    ``l_floor``  lower bound on the constant (a priori knowledge; 0 if none).
    ``e_bar``    constant error-belief term added to both envelopes.
    ``lower_bound``/``upper_bound``  optional componentwise a priori output
                 bounds (None means unbounded).
    """

    alpha: float = 1.0
    lam: float = 0.0
    l_floor: float = 0.0
    e_bar: float = 0.0
    lower_bound: Optional[np.ndarray] = None
    upper_bound: Optional[np.ndarray] = None
    metric: InputMetric = field(default_factory=InputMetric)

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.l_floor < 0:
            raise ValueError("l_floor must be nonnegative")
        if self.e_bar < 0:
            raise ValueError("e_bar must be nonnegative")
        if self.lower_bound is not None and self.upper_bound is not None:
            lo = np.atleast_1d(np.asarray(self.lower_bound, dtype=float))
            hi = np.atleast_1d(np.asarray(self.upper_bound, dtype=float))
            if lo.shape == hi.shape and np.any(lo > hi):
                raise ValueError("lower_bound exceeds upper_bound")


@dataclass
class Prediction:
    """Predicted value with its uncertainty envelope, per output component.

    ``value`` is the midpoint of the clipped ceiling/floor pair, ``halfwidth``
    half their gap.  A negative halfwidth signals envelope crossing, i.e.
    observations contradict the assumed regularity; it is reported unchanged.
    """

    value: np.ndarray
    halfwidth: np.ndarray
    ceiling: np.ndarray
    floor: np.ndarray


def _pair_ratio_max(
    xa: np.ndarray,
    ya: np.ndarray,
    xb: np.ndarray,
    yb: np.ndarray,
    config: KiConfig,
) -> float:
    """Max over positive-distance pairs (a_i, b_j) of (|dy|_inf - lam) / d^alpha.

    Returns -inf when no positive-distance pair exists.
    """
    best = -math.inf
    if len(xa) == 0 or len(xb) == 0:
        return best
    for start in range(0, len(xa), _CHUNK):
        sl = slice(start, start + _CHUNK)
        dist = config.metric.pairwise(xa[sl], xb)
        dy = np.abs(ya[sl, :, None] - yb.T[None, :, :]).max(axis=1)
        mask = dist > 0.0
        if mask.any():
            ratios = (dy[mask] - config.lam) / dist[mask] ** config.alpha
            best = max(best, float(ratios.max()))
    return best


def estimate_constant_batch(data: Dataset, config: KiConfig) -> float:
    """Smallest constant consistent with the data under allowance ``lam``.

    max{l_floor, max over positive-distance pairs of (|dy|_inf - lam)/d^alpha};
    the floor alone when no such pair exists.
    """
    ratio = _pair_ratio_max(
        data.inputs, data.observations, data.inputs, data.observations, config
    )
    return max(config.l_floor, ratio)


class LackiState:
    """Fitted state: a dataset plus the current lazily adapted constant.

    Supports O(N) online updates; the constant after any sequence of updates
    equals the batch estimate over the accumulated data.  Queries are pure
    reads; updates need exclusive access.
    """

    def __init__(self, config: KiConfig, data: Optional[Dataset] = None, *, d: Optional[int] = None, m: Optional[int] = None):
        self.config = config
        if data is None:
            if d is None or m is None:
                raise ValueError("need either data or explicit dimensions d, m")
            data = Dataset.empty(d, m)
        self._d = data.d
        self._m = data.m
        cap = max(16, data.n)
        self._x = np.empty((cap, self._d))
        self._y = np.empty((cap, self._m))
        self._n = data.n
        self._x[: self._n] = data.inputs
        self._y[: self._n] = data.observations
        self.ell = estimate_constant_batch(data, config)

    @property
    def data(self) -> Dataset:
        return Dataset(self._x[: self._n].copy(), self._y[: self._n].copy())

    @property
    def n(self) -> int:
        return self._n

    @property
    def d(self) -> int:
        return self._d

    @property
    def m(self) -> int:
        return self._m

    def _grow(self, extra: int):
        need = self._n + extra
        if need <= len(self._x):
            return
        cap = len(self._x)
        while cap < need:
            cap *= 2
        for name in ("_x", "_y"):
            old = getattr(self, name)
            new = np.empty((cap, old.shape[1]))
            new[: self._n] = old[: self._n]
            setattr(self, name, new)

    def add_observations(self, inputs, observations) -> "LackiState":
        """Append new (input, observation) pairs and update the constant.

        Cost is O(m * (k*N + k^2)) metric evaluations for k new pairs; the
        constant never decreases.  Returns self.
        """
        xs = np.atleast_2d(np.asarray(inputs, dtype=float))
        ys = np.atleast_2d(np.asarray(observations, dtype=float))
        if xs.size == 0:
            return self
        if xs.shape[1] != self._d or ys.shape[1] != self._m or len(xs) != len(ys):
            raise DimensionMismatchError(
                f"new pairs with shapes {xs.shape}, {ys.shape} do not match "
                f"state dimensions d={self._d}, m={self._m}"
            )
        cross = _pair_ratio_max(xs, ys, self._x[: self._n], self._y[: self._n], self.config)
        internal = _pair_ratio_max(xs, ys, xs, ys, self.config)
        self.ell = max(self.ell, cross, internal)
        self._grow(len(xs))
        self._x[self._n : self._n + len(xs)] = xs
        self._y[self._n : self._n + len(ys)] = ys
        self._n += len(xs)
        return self

    def _envelopes(self, queries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Raw ceiling/floor values for a (Q, d) query block, each (Q, m)."""
        q = len(queries)
        if self._n == 0:
            return np.full((q, self._m), math.inf), np.full((q, self._m), -math.inf)
        radius = (
            self.ell
            * self.config.metric.pairwise(queries, self._x[: self._n]) ** self.config.alpha
            + self.config.e_bar
        )
        obs = self._y[: self._n]
        up = (obs.T[None, :, :] + radius[:, None, :]).min(axis=2)
        lo = (obs.T[None, :, :] - radius[:, None, :]).max(axis=2)
        return up, lo

    def predict_batch(self, queries: np.ndarray) -> Prediction:
        """Vectorized prediction for a (Q, d) block of query points."""
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        if queries.shape[1] != self._d:
            raise DimensionMismatchError(
                f"queries have dimension {queries.shape[1]}, expected {self._d}"
            )
        if not np.all(np.isfinite(queries)):
            raise ValueError("query contains a non-finite component")
        ups = []
        los = []
        for start in range(0, len(queries), _CHUNK):
            up, lo = self._envelopes(queries[start : start + _CHUNK])
            ups.append(up)
            los.append(lo)
        up = np.concatenate(ups) if ups else np.empty((0, self._m))
        lo = np.concatenate(los) if los else np.empty((0, self._m))
        hi_b = _as_bound(self.config.upper_bound, self._m, math.inf)
        lo_b = _as_bound(self.config.lower_bound, self._m, -math.inf)
        ceiling = np.minimum(hi_b, up)
        floor = np.maximum(lo_b, lo)
        with np.errstate(invalid="ignore"):
            value = 0.5 * ceiling + 0.5 * floor
            halfwidth = 0.5 * ceiling - 0.5 * floor
        bad = ~np.isfinite(value)
        if bad.any():
            raise PredictionUndefinedError(
                "prediction undefined: envelopes are infinite (empty data "
                "with unbounded prior, or conflicting infinite bounds)"
            )
        return Prediction(value=value, halfwidth=halfwidth, ceiling=ceiling, floor=floor)

    def predict(self, query) -> Prediction:
        """Prediction at a single query point in R^d."""
        query = np.atleast_1d(np.asarray(query, dtype=float))
        p = self.predict_batch(query[None, :])
        return Prediction(p.value[0], p.halfwidth[0], p.ceiling[0], p.floor[0])

    def with_config(self, **changes) -> "LackiState":
        """Copy of this state with adjusted hyperparameters (constant refitted)."""
        return LackiState(replace(self.config, **changes), self.data)


def fit(data: Dataset, config: KiConfig) -> LackiState:
    """Fit on a batch: constant estimated over all pairs, data retained."""
    return LackiState(config, data)
