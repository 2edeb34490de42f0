"""Discrete-time model-reference adaptive control with an online-learned drift.

The plant is the classic slender-wing roll-dynamics testbed: double
integrator with a nonlinear drift a(x) and known input gain b.  A
feedback-linearizing controller tracks a second-order reference model; the
drift is unknown to the controller and learned online, one observation per
simulation step, by the lazily adapted interpolation rule.

Everything is forward-Euler with a single step size; state units are degrees
and degrees per second.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .core import KiConfig, LackiState

__all__ = [
    "WING_ROCK_W",
    "WING_ROCK_B",
    "WingRockPlant",
    "ReferenceModel",
    "MracConfig",
    "TrialRecord",
    "Simulation",
    "run_trial",
    "CampaignRandomization",
    "run_campaign",
]

# Nominal drift coefficients (W0..W5) and the known input gain of the
# roll-dynamics benchmark.
WING_ROCK_W = (0.8, 0.2314, 0.6918, -0.6245, 0.0095, 0.0214)
WING_ROCK_B = 3.0

_LOG_FLOOR = 1e-12
_DIVERGENCE_LIMIT = 1e6


@dataclass
class WingRockPlant:
    """Roll dynamics: x1 attitude [deg], x2 rate [deg/s]."""

    w: Tuple[float, ...] = WING_ROCK_W
    b: float = WING_ROCK_B

    def drift(self, x: np.ndarray) -> float:
        x1, x2 = float(x[0]), float(x[1])
        w = self.w
        return (
            w[0]
            + w[1] * x1
            + w[2] * x2
            + w[3] * abs(x1) * x2
            + w[4] * abs(x2) * x2
            + w[5] * x2**3
        )

    def derivative(self, x: np.ndarray, u: float) -> np.ndarray:
        return np.array([x[1], self.drift(x) + self.b * u])


@dataclass
class ReferenceModel:
    """Second-order reference: xi1'' driven toward the command r(t).

    Acceleration omega_n^2 (r - xi1) - 2 zeta omega_n xi2; the command is a
    square wave or sinusoid of configurable amplitude and period, or a
    constant setpoint.
    """

    omega_n: float = 1.0
    zeta: float = 0.5
    command: str = "square"
    amplitude: float = 1.0
    period: float = 20.0

    def command_at(self, t: float) -> float:
        if self.command == "square":
            return self.amplitude if (t % self.period) < 0.5 * self.period else -self.amplitude
        if self.command == "sine":
            return self.amplitude * math.sin(2.0 * math.pi * t / self.period)
        if self.command == "constant":
            return self.amplitude
        raise ValueError(f"unknown command shape: {self.command!r}")

    def accel(self, xi: np.ndarray, r: float) -> float:
        return self.omega_n**2 * (r - xi[0]) - 2.0 * self.zeta * self.omega_n * xi[1]

    def derivative(self, xi: np.ndarray, r: float) -> np.ndarray:
        return np.array([xi[1], self.accel(xi, r)])


def _default_learner() -> KiConfig:
    return KiConfig(alpha=1.0, lam=0.0, l_floor=1.0)


@dataclass(frozen=True)
class MracConfig:
    k1: float = 1.0
    k2: float = 1.0
    delta: float = 0.005
    t0: float = 0.0
    tf: float = 50.0
    x0: Tuple[float, float] = (3.0, 6.0)
    xi0: Tuple[float, float] = (0.0, 0.0)
    w_scale: float = 1.0
    obs_noise: float = 0.0
    learner: KiConfig = field(default_factory=_default_learner)
    seed: int = 0
    adaptive: bool = True
    omega_n: float = 1.0
    zeta: float = 0.5
    command: str = "square"
    command_amplitude: float = 1.0
    command_period: float = 20.0
    record_trajectory: bool = False

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.tf <= self.t0:
            raise ValueError("tf must exceed t0")
        if self.obs_noise < 0:
            raise ValueError("obs_noise must be nonnegative")

    @property
    def n_steps(self) -> int:
        return round((self.tf - self.t0) / self.delta)


@dataclass
class TrialRecord:
    """Per-trial metric bundle: log time-integrated magnitudes plus runtimes."""

    log_xerr: float
    log_xdoterr: float
    log_prederr: float
    log_cmd: float
    max_rt_predict: float
    max_rt_learn: float
    ell_final: float
    diverged: bool
    n_steps: int
    err_inf: np.ndarray        # per-step max-norm tracking error
    pred_err: np.ndarray       # per-step |nu_ad - a_true|
    trajectory: Optional[np.ndarray] = None
    trajectory_columns: Tuple[str, ...] = (
        "t", "x1", "x2", "xi1", "xi2", "e1", "e2", "u", "nu_ad", "a_true", "ell",
    )


class Simulation:
    """One trial's mutable state; strictly sequential (the learner threads
    through time).  Distinct trials are independent."""

    def __init__(self, config: MracConfig):
        self.config = config
        self.plant = WingRockPlant(w=tuple(config.w_scale * w for w in WING_ROCK_W))
        self.reference = ReferenceModel(
            omega_n=config.omega_n,
            zeta=config.zeta,
            command=config.command,
            amplitude=config.command_amplitude,
            period=config.command_period,
        )
        self.learner = LackiState(config.learner, d=2, m=1)
        self.rng = np.random.default_rng(config.seed)
        self.x = np.asarray(config.x0, dtype=float).copy()
        self.xi = np.asarray(config.xi0, dtype=float).copy()
        self.t = config.t0
        self.step_index = 0
        self.diverged = False

    def control(self) -> Tuple[float, float, float, float]:
        """Control input and its parts at the current state.

        Returns (u, nu_ad, nu_pd, nu_r).  The adaptive term is the learner's
        prediction of the drift; with no data yet (or learning disabled) it
        is zero and the loop degenerates to PD plus feedforward.
        """
        cfg = self.config
        r = self.reference.command_at(self.t)
        nu_r = self.reference.accel(self.xi, r)
        e = self.xi - self.x
        nu_pd = cfg.k1 * e[0] + cfg.k2 * e[1]
        if cfg.adaptive and self.learner.n > 0:
            nu_ad = float(self.learner.predict(self.x).value[0])
            if not math.isfinite(nu_ad):
                raise FloatingPointError("non-finite drift prediction")
        else:
            nu_ad = 0.0
        u = (nu_r + nu_pd - nu_ad) / self.plant.b
        return u, nu_ad, nu_pd, nu_r

    def step(self) -> None:
        """One Euler step of plant and reference, then one learner update."""
        cfg = self.config
        u, nu_ad, _, _ = self.control()
        x_prev = self.x.copy()
        a_true = self.plant.drift(x_prev)
        r = self.reference.command_at(self.t)
        self.x = self.x + cfg.delta * self.plant.derivative(self.x, u)
        self.xi = self.xi + cfg.delta * self.reference.derivative(self.xi, r)
        self.t += cfg.delta
        self.step_index += 1
        if cfg.adaptive:
            obs = a_true
            if cfg.obs_noise > 0:
                obs = obs + self.rng.uniform(-cfg.obs_noise, cfg.obs_noise)
            self.learner.add_observations(x_prev[None, :], np.array([[obs]]))
        if not np.all(np.isfinite(self.x)) or np.max(np.abs(self.x)) > _DIVERGENCE_LIMIT:
            self.diverged = True


def run_trial(config: MracConfig) -> TrialRecord:
    """Simulate t0..tf and integrate the performance metrics.

    Deterministic for a fixed config and seed.  Divergence aborts the trial
    and is recorded, not raised.
    """
    sim = Simulation(config)
    n = config.n_steps
    delta = config.delta
    xerr = xdoterr = prederr = cmd = 0.0
    max_rt_predict = 0.0
    max_rt_learn = 0.0
    err_inf = np.zeros(n)
    pred_err = np.zeros(n)
    rows = [] if config.record_trajectory else None

    steps_done = 0
    for i in range(n):
        t0 = time.perf_counter()
        u, nu_ad, _, _ = sim.control()
        max_rt_predict = max(max_rt_predict, time.perf_counter() - t0)
        e = sim.xi - sim.x
        a_true = sim.plant.drift(sim.x)
        err_inf[i] = np.max(np.abs(e))
        pred_err[i] = abs(nu_ad - a_true)
        xerr += abs(e[0]) * delta
        xdoterr += abs(e[1]) * delta
        prederr += pred_err[i] * delta
        cmd += abs(u) * delta
        if rows is not None:
            rows.append(
                (sim.t, sim.x[0], sim.x[1], sim.xi[0], sim.xi[1], e[0], e[1],
                 u, nu_ad, a_true, sim.learner.ell)
            )
        n_before = sim.learner.n
        t0 = time.perf_counter()
        sim.step()
        dt = time.perf_counter() - t0
        if sim.learner.n > n_before:
            max_rt_learn = max(max_rt_learn, dt)
        steps_done = i + 1
        if sim.diverged:
            err_inf = err_inf[:steps_done]
            pred_err = pred_err[:steps_done]
            break

    if rows is not None and not sim.diverged:
        # terminal row: state at tf with the control that would be applied
        u, nu_ad, _, _ = sim.control()
        e = sim.xi - sim.x
        rows.append(
            (sim.t, sim.x[0], sim.x[1], sim.xi[0], sim.xi[1], e[0], e[1],
             u, nu_ad, sim.plant.drift(sim.x), sim.learner.ell)
        )

    def _log(v: float) -> float:
        return math.log(max(v, _LOG_FLOOR))

    return TrialRecord(
        log_xerr=_log(xerr),
        log_xdoterr=_log(xdoterr),
        log_prederr=_log(prederr),
        log_cmd=_log(cmd),
        max_rt_predict=max_rt_predict,
        max_rt_learn=max_rt_learn,
        ell_final=sim.learner.ell,
        diverged=sim.diverged,
        n_steps=steps_done,
        err_inf=err_inf,
        pred_err=pred_err,
        trajectory=np.array(rows) if rows is not None else None,
    )


@dataclass(frozen=True)
class CampaignRandomization:
    """Per-trial randomization ranges; zero-width ranges pin the value."""

    x0_range: Tuple[float, float] = (0.0, 7.0)
    l_floor_range: Tuple[float, float] = (0.05, 2.0)
    w_scale_range: Tuple[float, float] = (0.0, 2.0)


def run_campaign(
    base: MracConfig,
    n_trials: int,
    randomization: Optional[CampaignRandomization] = None,
) -> List[TrialRecord]:
    """Randomized trials: initial state, constant floor and drift scale drawn
    per trial from the given ranges, seeds derived from the base seed."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    rand = randomization or CampaignRandomization()
    seeds = np.random.SeedSequence(base.seed).spawn(n_trials)
    records = []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        x0 = tuple(rng.uniform(*rand.x0_range, size=2))
        l_floor = float(rng.uniform(*rand.l_floor_range))
        w_scale = float(rng.uniform(*rand.w_scale_range))
        cfg = replace(
            base,
            x0=x0,
            w_scale=w_scale,
            learner=replace(base.learner, l_floor=l_floor),
            seed=int(rng.integers(2**63)),
        )
        records.append(run_trial(cfg))
    return records
