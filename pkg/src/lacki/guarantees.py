"""Closed-form guarantee calculators.

Two families:

* a sample-complexity bound: how many uniform random samples on [0,1]^d
  suffice for the interpolant of an L*-Lipschitz target to reach sup error
  <= epsilon with probability >= 1 - delta;

* worst-case bounds on the discrete tracking-error recurrence
  e_{n+1} = M e_n + Delta * F(x_n) with norm-bounded innovations F, in three
  variants of increasing looseness and decreasing cost.

Vector norms are max-norms throughout; the compatible matrix norm is
sqrt(dim) times the spectral norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "SampleComplexity",
    "sample_complexity",
    "ErrorSystem",
    "assemble_error_system",
    "simulate_recurrence",
    "bound_variant_1",
    "bound_variant_2",
    "bound_variant_3",
    "Variant2Result",
    "BoundReport",
    "bound_report",
]

_SERIES_RTOL = 1e-12
_SERIES_STREAK = 10


@dataclass(frozen=True)
class SampleComplexity:
    """Result of the sample-complexity calculation."""

    n: int
    k: int
    epsilon: float
    delta: float
    l_star: float
    d: int


def sample_complexity(epsilon: float, delta: float, l_star: float, d: int) -> SampleComplexity:
    """Sample count N for sup-error epsilon with confidence 1 - delta.

    For epsilon >= 2 L* a single sample suffices.  Otherwise partition
    [0,1]^d into 2^{kd} cells of edge 2^{-k} with k = ceil(log2(2 L* /
    epsilon)) and require every cell to be hit:
    N = ceil(log(delta 2^{-kd}) / log(1 - 2^{-kd})).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must be in (0, 1)")
    if l_star < 0:
        raise ValueError("l_star must be nonnegative")
    if d < 1:
        raise ValueError("d must be at least 1")
    if epsilon >= 2.0 * l_star:
        return SampleComplexity(1, 0, epsilon, delta, l_star, d)
    k = math.ceil(math.log(2.0 * l_star / epsilon) / math.log(2.0))
    p = 2.0 ** (-k * d)
    n = math.ceil((math.log(delta) + math.log(p)) / math.log1p(-p))
    return SampleComplexity(n, k, epsilon, delta, l_star, d)


class ErrorSystem:
    """Discrete tracking-error system e_{n+1} = M e_n + Delta F(x_n).

    M is the block matrix [[I, Delta*I], [-Delta*K1, I - Delta*K2]] for m x m
    gain matrices K1, K2; ``innovation_bound`` caps the max-norm of the
    innovations F.
    """

    def __init__(self, m: int, delta: float, k1: np.ndarray, k2: np.ndarray, innovation_bound: float):
        if delta <= 0:
            raise ValueError("delta must be positive")
        if innovation_bound < 0:
            raise ValueError("innovation_bound must be nonnegative")
        k1 = np.atleast_2d(np.asarray(k1, dtype=float))
        k2 = np.atleast_2d(np.asarray(k2, dtype=float))
        if k1.shape != (m, m) or k2.shape != (m, m):
            raise ValueError(f"gain matrices must be {m}x{m}, got {k1.shape} and {k2.shape}")
        self.m = m
        self.delta = delta
        self.k1 = k1
        self.k2 = k2
        self.innovation_bound = innovation_bound
        eye = np.eye(m)
        self.M = np.block([[eye, delta * eye], [-delta * k1, eye - delta * k2]])
        self.dim = 2 * m
        self._power_norms: List[float] = [self.mat_norm(np.eye(self.dim))]
        self._power: np.ndarray = np.eye(self.dim)
        self._tail_sum: Optional[float] = None

    @staticmethod
    def mat_norm_for(dim: int, a: np.ndarray) -> float:
        """sqrt(dim) * spectral norm: compatible with the max vector norm."""
        return math.sqrt(dim) * float(np.linalg.norm(a, 2))

    def mat_norm(self, a: np.ndarray) -> float:
        return self.mat_norm_for(self.dim, a)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.M))))

    def power_norm(self, i: int) -> float:
        """|||M^i||| with caching of successive powers."""
        while len(self._power_norms) <= i:
            self._power = self._power @ self.M
            self._power_norms.append(self.mat_norm(self._power))
        return self._power_norms[i]

    def power_norm_sum(self, n: int) -> float:
        """Sum of |||M^i||| for i = 0 .. n-1."""
        return sum(self.power_norm(i) for i in range(n))

    def power_norm_tail_sum(self) -> float:
        """Sum of |||M^i||| to convergence; requires spectral radius < 1."""
        if self._tail_sum is not None:
            return self._tail_sum
        if self.spectral_radius >= 1.0:
            raise ValueError("series diverges: spectral radius >= 1")
        total = 0.0
        streak = 0
        i = 0
        while streak < _SERIES_STREAK:
            term = self.power_norm(i)
            total += term
            streak = streak + 1 if term < _SERIES_RTOL * max(total, 1.0) else 0
            i += 1
        self._tail_sum = total
        return total


def assemble_error_system(m: int, delta: float, k1, k2, innovation_bound: float) -> ErrorSystem:
    return ErrorSystem(m, delta, k1, k2, innovation_bound)


def simulate_recurrence(
    sys: ErrorSystem, e0: np.ndarray, innovations: Sequence[np.ndarray]
) -> Tuple[np.ndarray, np.ndarray]:
    """Iterate the recurrence and reconstruct it in closed form.

    Returns (errors, closed_form), both of shape (n+1, 2m) for n innovation
    vectors, where closed_form[n] = M^n e0 + Delta * sum_i M^{n-1-i} F_i.
    The two agree up to floating-point accumulation and serve as mutual
    cross-checks.
    """
    e0 = np.asarray(e0, dtype=float)
    if e0.shape != (sys.dim,):
        raise ValueError(f"e0 must have shape ({sys.dim},)")
    innovations = [np.asarray(f, dtype=float) for f in innovations]
    for f in innovations:
        if f.shape != (sys.dim,):
            raise ValueError(f"innovation must have shape ({sys.dim},)")
    n = len(innovations)
    errors = np.empty((n + 1, sys.dim))
    errors[0] = e0
    for i, f in enumerate(innovations):
        errors[i + 1] = sys.M @ errors[i] + sys.delta * f

    closed = np.empty((n + 1, sys.dim))
    power = np.eye(sys.dim)
    powers = [power]
    for _ in range(n):
        power = sys.M @ power
        powers.append(power)
    for j in range(n + 1):
        acc = powers[j] @ e0
        for i in range(j):
            acc = acc + sys.delta * (powers[j - 1 - i] @ innovations[i])
        closed[j] = acc
    return errors, closed


def bound_variant_1(sys: ErrorSystem, e0_norm: float, n: int) -> float:
    """Partial-sum bound: |||M^n||| |e0| + Delta Nbar sum_{i<n} |||M^i|||."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return sys.power_norm(n) * e0_norm + sys.delta * sys.innovation_bound * sys.power_norm_sum(n)


@dataclass(frozen=True)
class Variant2Result:
    bound: float
    asymptote: float
    k0: int
    phi: float
    c: float
    c_choice: str


def _find_k0(sys: ErrorSystem) -> int:
    """Smallest k0 > 1 with |||M^k||| < 1 for all k >= k0.

    Verified constructively: if the norms at k0 .. 2*k0 - 1 are all below 1,
    submultiplicativity over k0-blocks covers every larger power.
    """
    rho = sys.spectral_radius
    if rho >= 1.0:
        raise ValueError("variant 2 requires spectral radius < 1")
    try:
        cond = float(np.linalg.cond(np.linalg.eig(sys.M)[1]))
        if not math.isfinite(cond):
            cond = 1e6
    except np.linalg.LinAlgError:
        cond = 1e6
    horizon = 10 * math.ceil(
        math.log(max(math.sqrt(sys.dim) * cond, 2.0)) / max(-math.log(rho), 1e-12)
    )
    horizon = min(max(horizon, 16), 10**6)
    for k0 in range(2, horizon + 1):
        if all(sys.power_norm(k) < 1.0 for k in range(k0, 2 * k0)):
            return k0
    raise ValueError(f"no contracting power found within horizon {horizon}")


def bound_variant_2(sys: ErrorSystem, e0_norm: float, n: int) -> Variant2Result:
    """Geometric block bound for n > k0, with its n -> inf asymptote.

    Splits the power sequence into k0-blocks with contraction factor
    phi = |||M^{k0}||| < 1; the constant c is the best of three admissible
    choices (max early power norms; a closed form in the spectral radius;
    |||M|||^{k0}).
    """
    k0 = _find_k0(sys)
    phi = sys.power_norm(k0)
    dim = sys.dim
    r = sys.spectral_radius
    choices = {"max_power_norms": max(sys.power_norm(i) for i in range(1, k0))}
    if 0.0 < r < 1.0 and dim > 1:
        log_r = math.log(r)
        choices["spectral_closed_form"] = (
            ((1 - dim) / log_r) ** (dim - 1)
            / math.factorial(dim - 1)
            * sys.power_norm(1) ** (dim - 1)
            * r ** ((1 - dim) / log_r - dim + 1)
        )
    choices["norm_power"] = sys.power_norm(1) ** k0
    c_choice = min(choices, key=choices.get)
    c = choices[c_choice]
    n0 = k0  # block length doubles as the head-sum cutoff
    head = sys.power_norm_sum(n0)
    dn = n // k0
    bound = (
        c * phi**dn * e0_norm
        + sys.delta
        * sys.innovation_bound
        * (head + c * k0 * (phi - phi ** (dn + 1)) / (1.0 - phi))
    )
    asymptote = sys.delta * sys.innovation_bound * (head + c * k0 * phi / (1.0 - phi))
    return Variant2Result(bound=bound, asymptote=asymptote, k0=k0, phi=phi, c=c, c_choice=c_choice)


def bound_variant_3(sys: ErrorSystem, e0_norm: float, n: int) -> float:
    """One-norm geometric bound: |||M|||^n |e0| + Delta Nbar (1-|||M|||^n)/(1-|||M|||)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    nm = sys.power_norm(1)
    if abs(nm - 1.0) < 1e-12:
        raise ValueError("bound is singular at |||M||| == 1")
    return nm**n * e0_norm + sys.delta * sys.innovation_bound * (1.0 - nm**n) / (1.0 - nm)


@dataclass
class BoundReport:
    """Bound sequences for steps 0..n for all applicable variants."""

    spectral_radius: float
    matrix_norm: float
    steps: np.ndarray
    variant1: np.ndarray
    variant3: Optional[np.ndarray] = None
    variant2: Optional[np.ndarray] = None
    variant2_info: Optional[Variant2Result] = None

    def to_dict(self) -> dict:
        out = {
            "spectral_radius": self.spectral_radius,
            "matrix_norm": self.matrix_norm,
            "steps": self.steps.tolist(),
            "variant1": self.variant1.tolist(),
        }
        if self.variant3 is not None:
            out["variant3"] = self.variant3.tolist()
        if self.variant2 is not None and self.variant2_info is not None:
            out["variant2"] = self.variant2.tolist()
            out["variant2_k0"] = self.variant2_info.k0
            out["variant2_phi"] = self.variant2_info.phi
            out["variant2_c"] = self.variant2_info.c
            out["variant2_c_choice"] = self.variant2_info.c_choice
            out["variant2_asymptote"] = self.variant2_info.asymptote
        return out


def bound_report(sys: ErrorSystem, e0_norm: float, n_max: int) -> BoundReport:
    """Evaluate every applicable bound variant at steps 0..n_max."""
    steps = np.arange(n_max + 1)
    v1 = np.array([bound_variant_1(sys, e0_norm, int(n)) for n in steps])
    v3 = None
    if abs(sys.power_norm(1) - 1.0) >= 1e-12:
        v3 = np.array([bound_variant_3(sys, e0_norm, int(n)) for n in steps])
    v2 = None
    info = None
    if sys.spectral_radius < 1.0:
        info = bound_variant_2(sys, e0_norm, max(n_max, 2))
        vals = []
        for n in steps:
            if n > info.k0:
                vals.append(bound_variant_2(sys, e0_norm, int(n)).bound)
            else:
                vals.append(math.nan)
        v2 = np.array(vals)
    return BoundReport(
        spectral_radius=sys.spectral_radius,
        matrix_norm=sys.power_norm(1),
        steps=steps,
        variant1=v1,
        variant3=v3,
        variant2=v2,
        variant2_info=info,
    )
