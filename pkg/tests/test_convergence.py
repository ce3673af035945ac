import math

import numpy as np
import pytest

from evoindex.convergence import (
    DeathModel,
    Trajectory,
    estimate_alpha,
    expected_remaining,
    exposure_proportion,
    pure_death_oracle,
    theory_trajectory,
    time_to_proportion,
    variance_remaining,
)

# frozen reference values, computed by hand from the closed forms:
#   t_p = -ln(1-p)/alpha, so t_90 = ln(10)/alpha
T90_ALPHA_20 = 46.05170185988092
T90_ALPHA_40 = 92.10340371976184
T90_ALPHA_60 = 138.15510557964276
EXP_MINUS_1 = 0.36787944117144233


def test_death_model_validation():
    DeathModel(1, 0.05)
    with pytest.raises(ValueError):
        DeathModel(0, 0.05)
    with pytest.raises(ValueError):
        DeathModel(10, 0.0)


def test_expected_remaining_closed_form():
    model = DeathModel(60000, 1 / 15)
    assert expected_remaining(model, 0.0) == 60000.0
    assert expected_remaining(model, 15.0) == pytest.approx(60000 * EXP_MINUS_1)
    arr = expected_remaining(model, np.array([0.0, 15.0, 30.0]))
    assert arr[0] == 60000.0
    assert arr[2] == pytest.approx(60000 * EXP_MINUS_1**2)
    with pytest.raises(ValueError):
        expected_remaining(model, -1.0)


def test_variance_zero_at_both_ends_and_peak_at_quarter_s0():
    model = DeathModel(60000, 1 / 15)
    assert variance_remaining(model, 0.0) == 0.0
    # variance vanishes again once everything is exposed
    assert variance_remaining(model, 1e6) == pytest.approx(0.0, abs=1e-6)
    t_star = math.log(2) / model.alpha
    assert variance_remaining(model, t_star) == pytest.approx(model.s0 / 4)
    # t_star is the argmax: nearby times give strictly less
    assert variance_remaining(model, t_star * 0.8) < model.s0 / 4
    assert variance_remaining(model, t_star * 1.2) < model.s0 / 4


def test_exposure_proportion_is_population_free():
    # p(t) never mentions s0; same alpha gives the same curve
    t = np.linspace(0.0, 100.0, 21)
    p = exposure_proportion(1 / 15, t)
    assert p[0] == 0.0
    assert np.all(np.diff(p) > 0)
    assert np.all(p < 1.0)
    assert exposure_proportion(1 / 15, 15.0) == pytest.approx(1 - EXP_MINUS_1)


def test_time_to_proportion_frozen_values():
    assert time_to_proportion(1 / 20, 0.9) == pytest.approx(T90_ALPHA_20, rel=1e-12)
    assert time_to_proportion(1 / 40, 0.9) == pytest.approx(T90_ALPHA_40, rel=1e-12)
    assert time_to_proportion(1 / 60, 0.9) == pytest.approx(T90_ALPHA_60, rel=1e-12)
    assert time_to_proportion(0.1, 0.0) == 0.0
    with pytest.raises(ValueError):
        time_to_proportion(0.1, 1.0)
    with pytest.raises(ValueError):
        time_to_proportion(0.0, 0.5)


def test_time_to_proportion_inverts_exposure_proportion():
    rng = np.random.default_rng(3)
    for _ in range(200):
        alpha = float(rng.uniform(0.01, 2.0))
        p = float(rng.uniform(0.0, 0.999))
        t = time_to_proportion(alpha, p)
        assert exposure_proportion(alpha, t) == pytest.approx(p, abs=1e-12)


def test_theory_trajectory_carries_closed_forms():
    model = DeathModel(1000, 0.1)
    times = [5.0, 10.0, 20.0]
    traj = theory_trajectory(model, times)
    assert traj.s0 == 1000
    assert list(traj.remaining) == [expected_remaining(model, t) for t in times]
    assert list(traj.p) == [exposure_proportion(0.1, t) for t in times]


def test_trajectory_validation_and_csv(tmp_path):
    with pytest.raises(ValueError):
        Trajectory(10, [1.0, 2.0], [5, 4], [0.5], [1, 1])
    with pytest.raises(ValueError):
        Trajectory(10, [2.0, 1.0], [5, 4], [0.5, 0.6], [1, 1])
    traj = Trajectory(10, [1.0, 2.0], [5, 4], [0.5, 0.6], [5, 1])
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t_days,remaining,p,clicks"
    assert lines[1] == "1.000000,5,0.500000,5"
    assert lines[2] == "2.000000,4,0.600000,1"


def test_oracle_input_validation():
    model = DeathModel(100, 0.1)
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        pure_death_oracle(model, 0.0, [1.0], rng)
    with pytest.raises(ValueError):
        pure_death_oracle(model, 10.0, [], rng)
    with pytest.raises(ValueError):
        pure_death_oracle(model, 10.0, [5.0, 2.0], rng)
    with pytest.raises(ValueError):
        pure_death_oracle(model, 10.0, [5.0, 20.0], rng)


def test_oracle_trajectory_is_monotone_and_consistent():
    model = DeathModel(5000, 0.2)
    times = np.arange(1.0, 21.0)
    traj = pure_death_oracle(model, 20.0, times, np.random.default_rng(5))
    assert len(traj) == 20
    rem = np.asarray(traj.remaining)
    assert np.all(np.diff(rem) <= 0)  # deaths only, never births
    assert np.all(rem >= 0) and rem[0] <= model.s0
    # p and remaining describe the same state
    assert np.allclose(traj.p, (model.s0 - rem) / model.s0)
    # interval click counts sum to the total exposed so far
    assert int(np.sum(traj.clicks)) == model.s0 - int(rem[-1])
    assert traj.final_explored == model.s0 - int(rem[-1])
    assert traj.click_histogram == {1: traj.final_explored}


def test_oracle_is_reproducible():
    model = DeathModel(1000, 0.1)
    times = [2.0, 4.0, 8.0]
    a = pure_death_oracle(model, 10.0, times, np.random.default_rng(9))
    b = pure_death_oracle(model, 10.0, times, np.random.default_rng(9))
    assert np.array_equal(a.remaining, b.remaining)
    assert np.array_equal(a.clicks, b.clicks)


def test_oracle_mean_tracks_closed_form():
    # ensemble mean of the stochastic twin vs E[S_t], within 4 sigma of the
    # closed-form variance at each time
    model = DeathModel(20000, 1 / 10)
    times = np.array([2.0, 5.0, 10.0, 20.0, 40.0])
    n = 30
    paths = np.vstack(
        [
            np.asarray(
                pure_death_oracle(model, 40.0, times, np.random.default_rng(s)).remaining,
                dtype=float,
            )
            for s in range(n)
        ]
    )
    mean = paths.mean(axis=0)
    expect = expected_remaining(model, times)
    band = 4 * np.sqrt(variance_remaining(model, times) / n)
    assert np.all(np.abs(mean - expect) <= band)


def test_oracle_single_index_survival_probability():
    # one index with alpha=0.5 checked at t = 1/alpha: survival chance is
    # exp(-1); 20000 independent single-index runs, 4 sigma binomial band
    model = DeathModel(1, 0.5)
    rng = np.random.default_rng(17)
    t = 1.0 / model.alpha
    survived = 0
    n = 20000
    for _ in range(n):
        traj = pure_death_oracle(model, t, [t], rng)
        survived += int(traj.remaining[0])
    rate = survived / n
    sigma = math.sqrt(EXP_MINUS_1 * (1 - EXP_MINUS_1) / n)
    assert abs(rate - EXP_MINUS_1) < 4 * sigma


def test_estimate_alpha_recovers_known_rate():
    model = DeathModel(200000, 1 / 25)
    times = np.arange(5.0, 80.0, 5.0)
    traj = pure_death_oracle(model, 80.0, times, np.random.default_rng(2))
    est = estimate_alpha(traj)
    assert est.alpha == pytest.approx(model.alpha, rel=0.02)
    assert est.n_points == len(times)
    assert est.stderr > 0.0


def test_estimate_alpha_exact_on_noiseless_curve():
    model = DeathModel(1000, 0.07)
    traj = theory_trajectory(model, [10.0, 20.0, 30.0, 40.0])
    est = estimate_alpha(traj)
    assert est.alpha == pytest.approx(0.07, rel=1e-9)
    assert est.stderr == pytest.approx(0.0, abs=1e-9)


def test_estimate_alpha_two_points_has_nan_stderr():
    model = DeathModel(1000, 0.05)
    traj = theory_trajectory(model, [10.0, 20.0])
    est = estimate_alpha(traj)
    assert est.alpha == pytest.approx(0.05, rel=1e-9)
    assert est.n_points == 2
    assert math.isnan(est.stderr)


def test_estimate_alpha_excludes_exhausted_samples():
    # remaining = 0 has no logarithm; those samples must be dropped
    traj = Trajectory(100, [1.0, 2.0, 3.0], [50, 25, 0], [0.5, 0.75, 1.0], [0, 0, 0])
    est = estimate_alpha(traj)
    assert est.n_points == 2
    assert est.alpha == pytest.approx(math.log(2), rel=1e-9)
    with pytest.raises(ValueError):
        estimate_alpha(Trajectory(100, [1.0, 2.0], [3, 0], [0.97, 1.0], [0, 0]))
