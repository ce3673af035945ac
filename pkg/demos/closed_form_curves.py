"""Walk through the closed-form exposure model.

With s0 unexplored indexes and per-index exposure rate alpha (per day),

    E[S_t] = s0 * exp(-alpha t)
    V[S_t] = s0 * exp(-alpha t) * (1 - exp(-alpha t))
    p(t)   = 1 - exp(-alpha t)          (independent of s0)
    t_p    = -ln(1 - p) / alpha

This script tabulates the curves, shows where the variance peaks, and
closes with a quick Monte Carlo sanity check of the single-index
survival probability.

Run:  python3 demos/closed_form_curves.py
"""

import math

import numpy as np

from evoindex.convergence import (
    DeathModel,
    expected_remaining,
    exposure_proportion,
    pure_death_oracle,
    time_to_proportion,
    variance_remaining,
)


def main():
    s0 = 60_000
    alpha = 1 / 15
    model = DeathModel(s0, alpha)

    print(f"closed forms for s0 = {s0}, alpha = 1/15 per day")
    print(f"{'day':>6} {'E[S_t]':>12} {'V[S_t]':>12} {'p(t)':>8}")
    for day in range(0, 91, 15):
        e = expected_remaining(model, day)
        v = variance_remaining(model, day)
        p = exposure_proportion(alpha, day)
        print(f"{day:6d} {e:12.1f} {v:12.1f} {p:8.4f}")

    print()
    print("days until 90% of the population has been exposed:")
    for a, label in [(1 / 20, "1/20"), (1 / 40, "1/40"), (1 / 60, "1/60")]:
        print(f"  alpha = {label:>4}: t90 = {time_to_proportion(a, 0.9):7.2f}")

    # the variance curve rises, peaks at t* = ln2/alpha with value s0/4,
    # then falls back toward zero as the population empties out
    t_star = math.log(2) / alpha
    print()
    print(f"variance peak: t* = ln2/alpha = {t_star:.3f} days")
    for t in (0.5 * t_star, t_star, 2.0 * t_star):
        print(f"  V({t:6.2f}) = {variance_remaining(model, t):10.1f}"
              f"{'   <- s0/4' if t == t_star else ''}")

    # survival check: a single index is still unexposed at t = 1/alpha
    # with probability exp(-1); simulate 200k independent exposure clocks
    n = 200_000
    t = 1.0 / alpha
    traj = pure_death_oracle(DeathModel(n, alpha), t, [t], np.random.default_rng(7))
    rate = traj.remaining[0] / n
    print()
    print(f"single-index survival at t = 1/alpha:")
    print(f"  theory    exp(-1) = {math.exp(-1):.5f}")
    print(f"  simulated ({n} clocks) = {rate:.5f}")


if __name__ == "__main__":
    main()
