"""Pure-death exposure model: closed forms and a brute-force stochastic twin.

Each of the s0 initially unexplored indexes is exposed after an independent
Exponential(alpha) waiting time, so the remaining count S_t is a pure-death
process with closed forms

    E[S_t] = s0 * exp(-alpha t)
    V[S_t] = s0 * exp(-alpha t) * (1 - exp(-alpha t))
    p(t)   = 1 - exp(-alpha t)          (exposed proportion, s0-free)

The variance peaks at t = ln2/alpha with value s0/4, and the time to reach
proportion p is -ln(1-p)/alpha.  ``pure_death_oracle`` simulates the same
process directly from per-index exponential draws, deliberately sharing no
code with the closed forms, so the two routes cross-validate each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

__all__ = [
    "DeathModel",
    "Trajectory",
    "AlphaEstimate",
    "expected_remaining",
    "variance_remaining",
    "exposure_proportion",
    "time_to_proportion",
    "theory_trajectory",
    "pure_death_oracle",
    "estimate_alpha",
]


@dataclass(frozen=True)
class DeathModel:
    """Initial unexplored population and per-index exposure rate (1/days)."""

    s0: int
    alpha: float

    def __post_init__(self) -> None:
        if self.s0 < 1:
            raise ValueError(f"s0 must be >= 1, got {self.s0}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass
class Trajectory:
    """Sampled path of the remaining-unexplored count.

    times are strictly increasing days; remaining holds counts; p is the
    exposed proportion (s0 - remaining)/s0; clicks counts the click (or
    exposure) events inside each inter-sample interval.  Extra fields carry
    per-trial bookkeeping from the mechanistic harness.
    """

    s0: int
    times: np.ndarray
    remaining: np.ndarray
    p: np.ndarray
    clicks: np.ndarray
    seed: int | None = None
    violations: int = 0
    removed_objects: int = 0
    final_explored: int = 0
    click_histogram: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.remaining = np.asarray(self.remaining)
        self.p = np.asarray(self.p, dtype=float)
        self.clicks = np.asarray(self.clicks)
        n = len(self.times)
        if not (len(self.remaining) == len(self.p) == len(self.clicks) == n):
            raise ValueError("trajectory columns differ in length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    def to_csv(self, path) -> None:
        """Write `t_days,remaining,p,clicks` rows (reals to 6 decimals)."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write("t_days,remaining,p,clicks\n")
            for t, r, p, c in zip(self.times, self.remaining, self.p, self.clicks):
                fh.write(f"{t:.6f},{int(r)},{p:.6f},{int(c)}\n")


def _check_times(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("time must be non-negative")
    return arr


def expected_remaining(model: DeathModel, t):
    """E[S_t] = s0 * exp(-alpha t).  Accepts scalars or arrays."""
    arr = _check_times(t)
    out = model.s0 * np.exp(-model.alpha * arr)
    return float(out) if np.isscalar(t) else out


def variance_remaining(model: DeathModel, t):
    """V[S_t] = s0 * exp(-alpha t) * (1 - exp(-alpha t))."""
    arr = _check_times(t)
    e = np.exp(-model.alpha * arr)
    out = model.s0 * e * (1.0 - e)
    return float(out) if np.isscalar(t) else out


def exposure_proportion(alpha: float, t):
    """p(t) = 1 - exp(-alpha t); independent of the population size."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    arr = _check_times(t)
    out = -np.expm1(-alpha * arr)
    return float(out) if np.isscalar(t) else out


def time_to_proportion(alpha: float, p: float) -> float:
    """Days until the exposed proportion reaches p: -ln(1-p)/alpha."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    return -math.log1p(-p) / alpha


def theory_trajectory(model: DeathModel, sample_times: Sequence[float]) -> Trajectory:
    """Noise-free trajectory carrying the closed-form mean at each time.

    Useful as a reference curve; remaining holds real values, not counts.
    """
    times = _check_times(sample_times)
    remaining = expected_remaining(model, times)
    p = exposure_proportion(model.alpha, times)
    clicks = np.zeros(len(times), dtype=int)
    return Trajectory(model.s0, times, remaining, p, clicks)


def pure_death_oracle(
    model: DeathModel,
    horizon: float,
    sample_times: Sequence[float],
    rng: np.random.Generator,
) -> Trajectory:
    """Simulate the death process by drawing each index's exposure time.

    Every index dies at an independent Exponential(alpha) time; the
    trajectory records how many are still alive at each requested sample
    time.  clicks counts the exposures falling inside each inter-sample
    interval.
    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    times = _check_times(sample_times)
    if len(times) == 0:
        raise ValueError("need at least one sample time")
    if len(times) > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("sample times must be strictly increasing")
    if float(times[-1]) > horizon + 1e-12:
        raise ValueError("sample times must not exceed the horizon")
    exposure = np.sort(rng.exponential(scale=1.0 / model.alpha, size=model.s0))
    exposed = np.searchsorted(exposure, times, side="right")
    remaining = model.s0 - exposed
    p = exposed / model.s0
    clicks = np.diff(exposed, prepend=0)
    return Trajectory(
        model.s0,
        times,
        remaining,
        p,
        clicks,
        final_explored=int(exposed[-1]),
        click_histogram={1: int(exposed[-1])} if exposed[-1] else {},
    )


@dataclass(frozen=True)
class AlphaEstimate:
    """Least-squares decay-rate fit; stderr is NaN for a two-point fit."""

    alpha: float
    stderr: float
    n_points: int


def estimate_alpha(trajectory: Trajectory) -> AlphaEstimate:
    """Fit alpha from ln(remaining/s0) against t by least squares.

    Samples with remaining = 0 are excluded (their log is undefined); at
    least two positive samples are required.  Returns the negated slope and
    its standard error.
    """
    times = trajectory.times
    remaining = np.asarray(trajectory.remaining, dtype=float)
    mask = remaining > 0
    if int(mask.sum()) < 2:
        raise ValueError("need at least two samples with remaining > 0")
    x = times[mask]
    y = np.log(remaining[mask] / trajectory.s0)
    n = int(mask.sum())
    fit = stats.linregress(x, y)
    # with two points there is no residual degree of freedom
    stderr = float(fit.stderr) if n > 2 else float("nan")
    return AlphaEstimate(alpha=float(-fit.slope), stderr=stderr, n_points=n)
