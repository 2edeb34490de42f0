"""Combinator algebra over (constant, exponent) regularity descriptors.

Each descriptor certifies |f(x) - f(x')| <= constant * d(x, x')^exponent.
The combinators propagate that certificate through scaling, addition,
products, composition, pointwise envelopes, reciprocals and exponent
weakening, so a priori constants for composite functions can be assembled
without touching the functions themselves.

Some rules need side information: products need sup|f| bounds
(``sup_abs``), reciprocals a positive inf|f| bound (``inf_abs``).
Operations that require a missing bound raise instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

__all__ = [
    "HolderDescriptor",
    "constant_map",
    "scale",
    "add",
    "multiply",
    "compose",
    "envelope",
    "reciprocal",
    "abs_of",
    "weaken",
    "gradient_sup_constant",
]


@dataclass(frozen=True)
class HolderDescriptor:
    constant: float
    exponent: float = 1.0
    sup_abs: Optional[float] = None
    inf_abs: Optional[float] = None

    def __post_init__(self):
        if self.constant < 0:
            raise ValueError("constant must be nonnegative")
        if not (0.0 < self.exponent <= 1.0):
            raise ValueError("exponent must be in (0, 1]")
        if self.inf_abs is not None and self.inf_abs <= 0:
            raise ValueError("inf_abs must be strictly positive when given")


def constant_map(value: float = 0.0, exponent: float = 1.0) -> HolderDescriptor:
    """Descriptor of a constant function: zero constant, any exponent."""
    return HolderDescriptor(0.0, exponent, sup_abs=abs(value), inf_abs=abs(value) or None)


def scale(h: HolderDescriptor, r: float) -> HolderDescriptor:
    """Descriptor of r*f: constant scales by |r|."""
    return HolderDescriptor(
        abs(r) * h.constant,
        h.exponent,
        sup_abs=None if h.sup_abs is None else abs(r) * h.sup_abs,
    )


def _require_aligned(f: HolderDescriptor, g: HolderDescriptor):
    if f.exponent != g.exponent:
        raise ValueError(
            f"exponent mismatch ({f.exponent} vs {g.exponent}); align with weaken() first"
        )


def add(f: HolderDescriptor, g: HolderDescriptor) -> HolderDescriptor:
    """Descriptor of f+g at a shared exponent: constants add."""
    _require_aligned(f, g)
    sup = None
    if f.sup_abs is not None and g.sup_abs is not None:
        sup = f.sup_abs + g.sup_abs
    return HolderDescriptor(f.constant + g.constant, f.exponent, sup_abs=sup)


def multiply(f: HolderDescriptor, g: HolderDescriptor) -> HolderDescriptor:
    """Descriptor of f*g; needs sup|f| and sup|g|."""
    _require_aligned(f, g)
    if f.sup_abs is None or g.sup_abs is None:
        raise ValueError("product rule needs sup_abs on both factors")
    return HolderDescriptor(
        f.sup_abs * g.constant + g.sup_abs * f.constant,
        f.exponent,
        sup_abs=f.sup_abs * g.sup_abs,
    )


def compose(f: HolderDescriptor, g: HolderDescriptor) -> HolderDescriptor:
    """Descriptor of f(g(.)): constant L_f * L_g^{p_f}, exponent p_f * p_g."""
    return HolderDescriptor(
        f.constant * g.constant**f.exponent,
        f.exponent * g.exponent,
        sup_abs=f.sup_abs,
    )


def envelope(hs: Sequence[HolderDescriptor]) -> HolderDescriptor:
    """Descriptor of a pointwise sup (or inf) family: max of the constants."""
    hs = list(hs)
    if not hs:
        raise ValueError("envelope of an empty family")
    p = hs[0].exponent
    for h in hs[1:]:
        if h.exponent != p:
            raise ValueError("envelope needs a common exponent")
    return HolderDescriptor(max(h.constant for h in hs), p)


def reciprocal(f: HolderDescriptor) -> HolderDescriptor:
    """Descriptor of 1/f; needs inf|f| > 0."""
    if f.inf_abs is None:
        raise ValueError("reciprocal rule needs inf_abs > 0")
    return HolderDescriptor(
        f.constant / f.inf_abs**2,
        f.exponent,
        sup_abs=1.0 / f.inf_abs,
    )


def abs_of(f: HolderDescriptor) -> HolderDescriptor:
    """Descriptor of |f|: constant and exponent carry over unchanged."""
    return replace(f)


def weaken(f: HolderDescriptor, q: float, diameter_bound: float) -> HolderDescriptor:
    """Re-certify f at a smaller exponent q.

    Valid when the output oscillation of f is bounded by ``diameter_bound``;
    the new constant is max{constant, diameter_bound}.
    """
    if not (0.0 < q <= f.exponent):
        raise ValueError(f"target exponent {q} outside (0, {f.exponent}]")
    return HolderDescriptor(
        max(f.constant, diameter_bound), q, sup_abs=f.sup_abs, inf_abs=f.inf_abs
    )


def gradient_sup_constant(fn, lo: float, hi: float, n: int = 100001) -> float:
    """Numeric sup of |f'| on [lo, hi] via central differences on a dense grid.

    Test oracle for the derivative-supremum characterization of the smallest
    Lipschitz constant of a smooth 1-D function; not a combinator.
    """
    import numpy as np

    xs = np.linspace(lo, hi, n)
    ys = np.asarray([fn(x) for x in xs], dtype=float)
    return float(np.max(np.abs(np.gradient(ys, xs))))
