"""Closed-form guarantees: sample counts and worst-case tracking bounds.

First the sample-complexity calculator: how many uniform random samples
make the interpolant of a Lipschitz target accurate everywhere with high
probability.  Then the three tracking-error bound variants for a stable
error recurrence, compared against a simulated worst-ish trajectory.
"""

import numpy as np

from lacki import (
    assemble_error_system,
    bound_variant_1,
    bound_variant_2,
    bound_variant_3,
    sample_complexity,
    simulate_recurrence,
)


def main():
    print("== sample complexity ==")
    print(f"{'eps':>6} {'delta':>6} {'L*':>4} {'d':>2} {'k':>3} {'N':>8}")
    for eps, delta, l_star, d in [(0.5, 0.1, 1, 1), (0.1, 0.1, 1, 1), (0.1, 0.01, 1, 2)]:
        r = sample_complexity(eps, delta, l_star, d)
        print(f"{eps:6.2f} {delta:6.2f} {l_star:4.1f} {d:2d} {r.k:3d} {r.n:8d}")

    print("\n== tracking-error bounds (unit gains, step 0.005) ==")
    sys = assemble_error_system(1, 0.005, [[1.0]], [[1.0]], innovation_bound=1.0)
    print(f"spectral radius: {sys.spectral_radius:.6f}")

    rng = np.random.default_rng(0)
    e0 = np.array([1.0, 0.0])
    innov = rng.uniform(-1, 1, (2000, 2))
    errors, _ = simulate_recurrence(sys, e0, innov)
    sup = np.max(np.abs(errors), axis=1)

    v2 = bound_variant_2(sys, sup[0], 2000)
    print(f"variant-2 block length {v2.k0}, contraction {v2.phi:.4f}, asymptote {v2.asymptote:.2f}")
    print(f"\n{'n':>6} {'simulated':>10} {'variant 1':>10} {'variant 2':>10} {'variant 3':>12}")
    for n in (10, 100, 500, 2000):
        row = [
            sup[n],
            bound_variant_1(sys, sup[0], n),
            bound_variant_2(sys, sup[0], n).bound if n > v2.k0 else float("nan"),
            bound_variant_3(sys, sup[0], n),
        ]
        print(f"{n:6d} {row[0]:10.4f} {row[1]:10.4f} {row[2]:10.4f} {row[3]:12.4g}")


if __name__ == "__main__":
    main()
