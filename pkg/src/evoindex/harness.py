"""Monte Carlo experiment harness: seeded trials, ensembles, theory checks.

Two trial modes share one trajectory format:

* abstract     - the per-index exposure clocks are simulated directly (the
                 pure-death oracle), parameterized by (s0, alpha).  Fast,
                 used to validate the closed forms.
* mechanistic  - the full loop: Poisson arrivals drive generated queries
                 through the selection/feedback engine against a ground
                 truth, and the remaining-unexplored count is measured by
                 classifying the truth pairs.  The effective decay rate
                 alpha_hat is an output here, not an input.

Ensembles aggregate per-seed trajectories on one sampling grid, compare the
empirical mean/variance against the closed forms, and report z-scores,
per-seed convergence times (first sample with p > 0.9) and the fitted decay
rate.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .convergence import (
    AlphaEstimate,
    DeathModel,
    Trajectory,
    estimate_alpha,
    expected_remaining,
    pure_death_oracle,
    variance_remaining,
)
from .engine import EngineConfig, apply_feedback, select_action
from .store import IndexClass, IndexStore
from .usersim import (
    GroundTruth,
    QueryGenerator,
    VocabularyState,
    generate_query,
    next_interarrival,
    simulate_click,
)

__all__ = [
    "Mode",
    "ExperimentConfig",
    "EnsembleReport",
    "TheoryComparison",
    "sample_grid",
    "run_trial",
    "run_monte_carlo",
    "build_ensemble_report",
    "detect_convergence",
    "compare_with_theory",
    "emit_outputs",
]

log = logging.getLogger(__name__)

CONVERGENCE_P = 0.9
Z_BAND = 3.0
Z_FRACTION_REQUIRED = 0.99


class Mode:
    ABSTRACT = "abstract"
    MECHANISTIC = "mechanistic"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one seeded trial needs.

    Abstract mode requires (s0, alpha) and forbids nothing else; mechanistic
    mode requires the arrival rate and the truth-graph shape and rejects an
    explicit alpha, because there the decay rate is measured.
    """

    mode: str
    horizon: float
    seeds: tuple[int, ...]
    sample_interval: float = 5.0
    # abstract mode
    s0: int | None = None
    alpha: float | None = None
    # mechanistic mode
    lam: float | None = None
    engine: EngineConfig = field(default_factory=EngineConfig)
    generator: QueryGenerator = field(default_factory=QueryGenerator)
    truth_terms: int = 1000
    truth_objects: int = 1000
    truth_degree: int = 1
    click_noise: float = 0.0
    init_links_per_term: int | None = None
    deconstruct_day: float | None = None
    deconstruct_objects: int = 0

    def __post_init__(self) -> None:
        if self.mode not in (Mode.ABSTRACT, Mode.MECHANISTIC):
            raise ValueError(f"mode must be abstract or mechanistic, got {self.mode!r}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if not 0 < self.sample_interval <= self.horizon:
            raise ValueError(
                f"sample_interval must lie in (0, horizon], got {self.sample_interval}"
            )
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError(f"seeds must be distinct, got {self.seeds}")
        if self.mode == Mode.ABSTRACT:
            if self.s0 is None or self.alpha is None:
                raise ValueError("abstract mode requires s0 and alpha")
            if self.s0 < 1:
                raise ValueError(f"s0 must be >= 1, got {self.s0}")
            if not self.alpha > 0:
                raise ValueError(f"alpha must be positive, got {self.alpha}")
        else:
            if self.alpha is not None:
                raise ValueError(
                    "mechanistic mode measures the decay rate; an explicit "
                    "alpha is inconsistent"
                )
            if self.lam is None or not self.lam > 0:
                raise ValueError("mechanistic mode requires a positive lambda")
            if self.truth_terms < 1 or self.truth_objects < 1:
                raise ValueError("truth graph needs at least one term and one object")
            if not 1 <= self.truth_degree <= self.truth_terms:
                raise ValueError(
                    f"truth_degree must lie in [1, truth_terms], got {self.truth_degree}"
                )
            if not 0.0 <= self.click_noise <= 1.0:
                raise ValueError(f"click_noise must lie in [0, 1], got {self.click_noise}")
            if self.deconstruct_objects < 0:
                raise ValueError("deconstruct_objects must be >= 0")

    @property
    def population(self) -> int:
        """Initial unexplored count: s0 directly, or the truth size."""
        if self.mode == Mode.ABSTRACT:
            assert self.s0 is not None
            return self.s0
        return self.truth_objects * self.truth_degree


def sample_grid(config: ExperimentConfig) -> np.ndarray:
    """The sampling times k * sample_interval, k = 1..floor(horizon/interval)."""
    n = int(config.horizon / config.sample_interval + 1e-9)
    return np.arange(1, n + 1) * config.sample_interval


def run_trial(config: ExperimentConfig, seed: int) -> Trajectory:
    """One seeded trial.  Same config and seed give a bit-identical result."""
    if config.mode == Mode.ABSTRACT:
        assert config.s0 is not None and config.alpha is not None
        rng = np.random.default_rng(seed)
        model = DeathModel(config.s0, config.alpha)
        traj = pure_death_oracle(model, config.horizon, sample_grid(config), rng)
        traj.seed = seed
        return traj
    return _run_mechanistic(config, seed)


def _run_mechanistic(config: ExperimentConfig, seed: int) -> Trajectory:
    rng = np.random.default_rng(seed)
    truth = GroundTruth.random_bipartite(
        config.truth_terms, config.truth_objects, config.truth_degree, rng
    )
    s0 = truth.size
    store = IndexStore()
    # inception: every object minimally indexed under one random term so the
    # whole corpus is searchable from day zero
    for obj in range(config.truth_objects):
        store.init_minimal_index(obj, (int(rng.integers(0, config.truth_terms)),))

    engine_cfg = config.engine
    init_links = (
        config.init_links_per_term
        if config.init_links_per_term is not None
        else engine_cfg.m
    )
    vocab = VocabularyState(range(config.truth_terms))
    linked_terms: set[int] = set()
    removed: set[int] = set()
    deconstruct_pending = (
        config.deconstruct_day is not None and config.deconstruct_objects > 0
    )

    grid = sample_grid(config)
    n_grid = len(grid)
    rem_out = np.zeros(n_grid, dtype=int)
    clicks_out = np.zeros(n_grid, dtype=int)
    next_idx = 0
    clicks_in_interval = 0
    violations = 0
    pair_clicks: dict[tuple[int, int], int] = {}

    t = 0.0
    assert config.lam is not None
    while True:
        t_new = t + next_interarrival(rng, config.lam)
        while next_idx < n_grid and grid[next_idx] < t_new:
            rem_out[next_idx] = store.count_unexplored(truth)
            clicks_out[next_idx] = clicks_in_interval
            clicks_in_interval = 0
            next_idx += 1
        if t_new > config.horizon:
            break
        t = t_new

        if deconstruct_pending and t >= config.deconstruct_day:
            deconstruct_pending = False
            pool = store.objects_sorted()
            count = min(config.deconstruct_objects, len(pool))
            picks = rng.choice(len(pool), size=count, replace=False)
            for i in picks:
                obj = pool[int(i)]
                store.deconstruct(obj)
                removed.add(obj)
            log.debug("deconstructed %d objects at t=%.3f", count, t)

        query, _case = generate_query(rng, config.generator, vocab)
        for term in query.terms:
            if term not in linked_terms:
                linked_terms.add(term)
                if init_links > 0:
                    pool = store.objects_sorted()
                    n_link = min(init_links, len(pool))
                    for i in rng.choice(len(pool), size=n_link, replace=False):
                        store.init_minimal_index(pool[int(i)], (term,))
        vocab.mark_seen(query.terms)

        presented = select_action(store, query, engine_cfg, rng)
        if removed:
            violations += sum(1 for o in presented.objects if o in removed)
        fb = simulate_click(presented, truth, query, config.click_noise, rng)
        if len(presented):
            signal = apply_feedback(store, query, presented, fb, engine_cfg)
            for term, obj, delta in signal.deltas:
                if delta > 0:
                    key = (term, obj)
                    pair_clicks[key] = pair_clicks.get(key, 0) + 1
        clicks_in_interval += len(fb.clicked)

    while next_idx < n_grid:
        rem_out[next_idx] = store.count_unexplored(truth)
        clicks_out[next_idx] = clicks_in_interval
        clicks_in_interval = 0
        next_idx += 1

    histogram: dict[int, int] = {}
    for (term, obj), n in pair_clicks.items():
        if store.classify(term, obj) is IndexClass.EXPLORED:
            histogram[n] = histogram.get(n, 0) + 1

    return Trajectory(
        s0,
        grid,
        rem_out,
        (s0 - rem_out) / s0,
        clicks_out,
        seed=seed,
        violations=violations,
        removed_objects=len(removed),
        final_explored=store.explored_count,
        click_histogram=histogram,
    )


@dataclass
class EnsembleReport:
    """Aggregated trajectories plus the closed-form reference curves.

    In abstract mode the theory curves use the configured alpha; in
    mechanistic mode they use the fitted alpha_hat (the measured bridge
    between arrival rate and decay rate), so z-scores there are descriptive.
    """

    mode: str
    s0: int
    n_seeds: int
    times: np.ndarray
    emp_mean: np.ndarray
    emp_var: np.ndarray
    theory_mean: np.ndarray
    theory_var: np.ndarray
    z_scores: np.ndarray
    convergence_times: dict[int, float | None]
    alpha_estimate: AlphaEstimate
    theory_alpha: float
    config_alpha: float | None
    gamma: float | None
    trajectories: list[Trajectory]
    violations: int
    click_histogram: dict[int, int]
    total_explored: int


def detect_convergence(trajectory: Trajectory) -> float | None:
    """First sample time with p strictly above 0.9, or None."""
    for t, p in zip(trajectory.times, trajectory.p):
        if p > CONVERGENCE_P:
            return float(t)
    return None


def build_ensemble_report(
    trajectories: Sequence[Trajectory],
    mode: str,
    config_alpha: float | None = None,
    gamma: float | None = None,
) -> EnsembleReport:
    """Aggregate same-grid trajectories and attach the theory columns.

    Trajectories must share the sampling grid; anything else is rejected.
    """
    if len(trajectories) < 2:
        raise ValueError("an ensemble needs at least two trajectories")
    times = trajectories[0].times
    s0 = trajectories[0].s0
    for traj in trajectories[1:]:
        if len(traj.times) != len(times) or not np.array_equal(traj.times, times):
            raise ValueError("trajectories disagree on the sampling grid")
        if traj.s0 != s0:
            raise ValueError("trajectories disagree on s0")
    matrix = np.vstack([np.asarray(t.remaining, dtype=float) for t in trajectories])
    emp_mean = matrix.mean(axis=0)
    emp_var = matrix.var(axis=0, ddof=1)

    mean_traj = Trajectory(
        s0, times, emp_mean, (s0 - emp_mean) / s0, np.zeros(len(times), dtype=int)
    )
    alpha_est = estimate_alpha(mean_traj)
    theory_alpha = config_alpha if mode == Mode.ABSTRACT else alpha_est.alpha
    if theory_alpha is None or not theory_alpha > 0:
        raise ValueError(f"no usable decay rate for theory curves: {theory_alpha}")
    model = DeathModel(s0, theory_alpha)
    theory_mean = expected_remaining(model, times)
    theory_var = variance_remaining(model, times)
    n = len(trajectories)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(
            theory_var > 0,
            (emp_mean - theory_mean) / np.sqrt(theory_var / n),
            np.nan,
        )
    histogram: dict[int, int] = {}
    for traj in trajectories:
        for k, v in traj.click_histogram.items():
            histogram[k] = histogram.get(k, 0) + v
    return EnsembleReport(
        mode=mode,
        s0=s0,
        n_seeds=n,
        times=times,
        emp_mean=emp_mean,
        emp_var=emp_var,
        theory_mean=theory_mean,
        theory_var=theory_var,
        z_scores=z,
        convergence_times={
            t.seed if t.seed is not None else i: detect_convergence(t)
            for i, t in enumerate(trajectories)
        },
        alpha_estimate=alpha_est,
        theory_alpha=float(theory_alpha),
        config_alpha=config_alpha,
        gamma=gamma,
        trajectories=list(trajectories),
        violations=sum(t.violations for t in trajectories),
        click_histogram=histogram,
        total_explored=sum(t.final_explored for t in trajectories),
    )


def run_monte_carlo(config: ExperimentConfig) -> EnsembleReport:
    """Run every seed and aggregate.  Requires at least two seeds."""
    if len(config.seeds) < 2:
        raise ValueError("run_monte_carlo needs at least two seeds")
    trajectories = [run_trial(config, seed) for seed in config.seeds]
    return build_ensemble_report(
        trajectories,
        mode=config.mode,
        config_alpha=config.alpha,
        gamma=config.engine.gamma if config.mode == Mode.MECHANISTIC else None,
    )


@dataclass
class TheoryComparison:
    """Side-by-side table and the pass flag.

    Abstract mode passes when |z| <= 3 at >= 99% of the sample times with
    defined z.  Mechanistic mode passes when every seed converged and the
    fitted decay rate is positive (there the theory curve is itself fitted,
    so the z-band is not the acceptance statement).
    """

    passed: bool
    fraction_within: float
    all_converged: bool
    alpha: AlphaEstimate
    rows: list[tuple[float, float, float, float, float, float]]

    def render(self) -> str:
        out = io.StringIO()
        out.write(
            f"{'t_days':>10} {'emp_mean':>14} {'theory_mean':>14} "
            f"{'emp_var':>14} {'theory_var':>14} {'z':>8}\n"
        )
        for t, em, tm, ev, tv, z in self.rows:
            z_txt = f"{z:8.2f}" if np.isfinite(z) else "     nan"
            out.write(f"{t:10.2f} {em:14.2f} {tm:14.2f} {ev:14.2f} {tv:14.2f} {z_txt}\n")
        out.write(
            f"alpha_hat = {self.alpha.alpha:.6f} (stderr {self.alpha.stderr:.6f}, "
            f"{self.alpha.n_points} points)\n"
        )
        out.write(
            f"|z| <= {Z_BAND:.0f} at {self.fraction_within:.1%} of sample times; "
            f"all seeds converged: {self.all_converged}\n"
        )
        out.write(f"result: {'PASS' if self.passed else 'FAIL'}\n")
        return out.getvalue()


def compare_with_theory(report: EnsembleReport) -> TheoryComparison:
    """Evaluate the ensemble against the closed forms (see TheoryComparison)."""
    if len(report.times) == 0:
        raise ValueError("report has no sample times")
    finite = np.isfinite(report.z_scores)
    if finite.any():
        fraction = float(
            (np.abs(report.z_scores[finite]) <= Z_BAND).sum() / finite.sum()
        )
    else:
        fraction = 0.0
    all_converged = all(
        v is not None for v in report.convergence_times.values()
    )
    if report.mode == Mode.ABSTRACT:
        passed = fraction >= Z_FRACTION_REQUIRED
    else:
        passed = all_converged and report.alpha_estimate.alpha > 0
    rows = [
        (
            float(t),
            float(em),
            float(tm),
            float(ev),
            float(tv),
            float(z),
        )
        for t, em, tm, ev, tv, z in zip(
            report.times,
            report.emp_mean,
            report.theory_mean,
            report.emp_var,
            report.theory_var,
            report.z_scores,
        )
    ]
    return TheoryComparison(
        passed=passed,
        fraction_within=fraction,
        all_converged=all_converged,
        alpha=report.alpha_estimate,
        rows=rows,
    )


def emit_outputs(report: EnsembleReport, out_dir) -> list[Path]:
    """Write the run artifacts and return their paths.

    Per seed: trajectory_seed<seed>.csv (t_days,remaining,p,clicks).
    Ensemble: ensemble.csv with empirical and theory columns.
    click_histogram.csv: clicks,count over explored indexes.
    convergence_summary.txt: per-seed convergence, fit, pass flag.

    Re-running the same report writes byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for traj in report.trajectories:
        path = out / f"trajectory_seed{traj.seed}.csv"
        traj.to_csv(path)
        written.append(path)

    ens = out / "ensemble.csv"
    with open(ens, "w", encoding="ascii") as fh:
        fh.write("t_days,empirical_mean,empirical_variance,theory_mean,theory_variance,z_score\n")
        for t, em, ev, tm, tv, z in zip(
            report.times,
            report.emp_mean,
            report.emp_var,
            report.theory_mean,
            report.theory_var,
            report.z_scores,
        ):
            z_txt = f"{z:.6f}" if np.isfinite(z) else "nan"
            fh.write(f"{t:.6f},{em:.6f},{ev:.6f},{tm:.6f},{tv:.6f},{z_txt}\n")
    written.append(ens)

    hist = out / "click_histogram.csv"
    with open(hist, "w", encoding="ascii") as fh:
        fh.write("clicks,count\n")
        for k in sorted(report.click_histogram):
            fh.write(f"{k},{report.click_histogram[k]}\n")
    written.append(hist)

    comparison = compare_with_theory(report)
    summary = out / "convergence_summary.txt"
    with open(summary, "w", encoding="ascii") as fh:
        fh.write(f"mode: {report.mode}\n")
        fh.write(f"s0: {report.s0}\n")
        fh.write(f"seeds: {report.n_seeds}\n")
        if report.config_alpha is not None:
            fh.write(f"alpha (configured): {report.config_alpha!r}\n")
        fh.write(f"alpha_hat: {report.alpha_estimate.alpha!r}\n")
        fh.write(f"alpha_stderr: {report.alpha_estimate.stderr!r}\n")
        if report.gamma is not None:
            fh.write(f"gamma (carried, unused): {report.gamma!r}\n")
        for seed in sorted(report.convergence_times):
            conv = report.convergence_times[seed]
            txt = f"{conv:.6f}" if conv is not None else "not reached"
            fh.write(f"convergence seed {seed}: {txt}\n")
        fh.write(f"presentation violations after removal: {report.violations}\n")
        fh.write(f"explored indexes (all seeds): {report.total_explored}\n")
        fh.write(f"fraction |z| <= {Z_BAND:.0f}: {comparison.fraction_within:.6f}\n")
        fh.write(f"result: {'PASS' if comparison.passed else 'FAIL'}\n")
    written.append(summary)
    return written
