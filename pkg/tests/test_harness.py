import math

import numpy as np
import pytest

from rmflab import (
    ExperimentConfig,
    Model,
    SampledFunction,
    block_boundaries,
    conditional_variance,
    doob_check,
    fluctuation_scale,
    hoeffding_tail_check,
    hypercontractive_check,
    large_prime_sum,
    partial_sum_second_moment_check,
    run_trial,
    sigma_event_statistic,
    submartingale_z_check,
    test_points as grid_points,
    variance_ratio_ensemble,
    y_submartingale_check,
)
from rmflab.harness import _y_trajectories, _z_trajectories


def _brute_test_points(epsilon, x_max):
    seen = []
    i = 1
    while True:
        x = math.floor(math.exp(i**epsilon))
        if x > x_max:
            break
        if x >= 3 and (not seen or x != seen[-1]):
            seen.append(x)
        i += 1
    return sorted(set(seen))


@pytest.mark.parametrize("epsilon,x_max", [(0.2, 2000), (0.24, 500), (0.1, 40)])
def test_test_points_match_direct_enumeration(epsilon, x_max):
    assert grid_points(epsilon, x_max).tolist() == _brute_test_points(epsilon, x_max)


def test_test_points_validation():
    with pytest.raises(ValueError):
        grid_points(0.3, 100)
    assert grid_points(0.1, 2).size == 0


def test_block_boundaries():
    # K = 2.5 at epsilon 0.1: exp(2) = 7.38 -> 7; the next endpoint is
    # exp(2^(2^2.5)) ~ exp(90), far beyond any table.
    assert block_boundaries(0.1, 1_000_000) == [7]
    assert block_boundaries(0.1, 6) == []
    out = block_boundaries(0.2, 10**7)
    assert out and all(b <= 10**7 for b in out)


def test_fluctuation_scale():
    assert fluctuation_scale(math.exp(math.e), 0.1) == pytest.approx(1.0)
    arr = fluctuation_scale(np.array([100, 10_000]), 0.1)
    assert arr[1] > arr[0] > 0
    with pytest.raises(ValueError):
        fluctuation_scale(2, 0.1)


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(epsilon=0.25)
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    cfg = ExperimentConfig(epsilon=0.1)
    assert cfg.K == pytest.approx(2.5)


def test_run_trial_consistent_with_pointwise(tables_small):
    cfg = ExperimentConfig(model=Model.STEINHAUS, x_max=3000)
    tr = run_trial(cfg, 5, tables_small)
    F = SampledFunction(Model.STEINHAUS, 5, tables_small)
    j = len(tr.grid) // 2
    x = int(tr.grid[j])
    assert tr.m_values[j] == pytest.approx(large_prime_sum(F, x), abs=1e-9)
    assert tr.v_values[j] == pytest.approx(conditional_variance(F, x), abs=1e-6)
    assert tr.normalized_sup >= abs(tr.m_values[j]) / (
        math.sqrt(x) * fluctuation_scale(x, cfg.epsilon)
    ) - 1e-12


@pytest.mark.parametrize("model", list(Model))
def test_hypercontractive_never_violated_here(tables_small, model):
    w = {n: 1.0 / n for n in range(1, 201)}
    for m in (1, 2, 3):
        rep = hypercontractive_check(w, m, 2000, model, tables_small)
        assert not rep.violated
        assert rep.bound > 0


def test_hypercontractive_m1_matches_orthogonality(tables_small):
    # m = 1 the bound is an identity: E|sum|^2 == sum |a_n|^2 over squarefree n.
    w = {1: 1.0, 2: 2.0, 3: -1.0, 4: 1.0, 6: 0.5}
    rep = hypercontractive_check(w, 1, 4000, Model.RADEMACHER, tables_small)
    sq_target = 1 + 4 + 1 + 0.25  # n = 4 contributes 0: f(4) = 0
    assert rep.estimate == pytest.approx(sq_target, abs=4 * rep.std_error)


def test_hypercontractive_validation(tables_small):
    with pytest.raises(ValueError):
        hypercontractive_check({1: 1.0}, 4, 2000, Model.RADEMACHER, tables_small)
    with pytest.raises(ValueError):
        hypercontractive_check({1: 1.0}, 1, 10, Model.RADEMACHER, tables_small)


@pytest.mark.parametrize("model", list(Model))
def test_hoeffding_tail(tables_small, model):
    rep = hoeffding_tail_check(model, 1000, 0.1, 3, 2000, tables_small)
    assert not rep.violated
    # v0 must equal the conditional variance of the frozen realization.
    F = SampledFunction(model, 3, tables_small)
    assert rep.aux["v0"] == pytest.approx(conditional_variance(F, 1000), rel=1e-9)
    assert rep.aux["threshold"] == pytest.approx(
        2.0 * math.sqrt(1000) * fluctuation_scale(1000, 0.1)
    )
    assert "literature_bound" in rep.aux


def test_submartingale_z_targets(tables_small):
    # Crossing k = 1369 = 37^2 reveals the prime 37 for x_base = 1000.
    reps = submartingale_z_check(Model.RADEMACHER, 1000, 1368, 1370, 1500, 2,
                                 tables_small)
    rep = reps[0]
    assert rep.aux["new_prime"] == 37
    F = SampledFunction(Model.RADEMACHER, 2, tables_small)
    a = F.prefix_sums(1000 // 37)[1000 // 37]
    assert rep.aux["target"] == pytest.approx(abs(a) ** 2)
    assert not rep.violated


def test_submartingale_z_no_prime_step(tables_small):
    reps = submartingale_z_check(Model.STEINHAUS, 1000, 1370, 1372, 500, 2,
                                 tables_small)
    assert all(r.estimate == 0.0 for r in reps)


@pytest.mark.parametrize("model", list(Model))
def test_y_submartingale_increment(tables_small, model):
    rep = y_submartingale_check(model, 100, 140, 300, 4, tables_small)
    assert not rep.violated
    assert rep.aux["y_prev"] > 0


def test_z_trajectories_nonnegative_and_growing_mean(tables_small):
    X = _z_trajectories(Model.RADEMACHER, np.arange(500), 1000, 100, tables_small)
    assert np.all(X >= 0)
    means = X.mean(axis=0)
    # submartingale: the mean trajectory should not trend down;
    # allow MC noise of a few SE on each comparison
    se = X.std(axis=0, ddof=1) / math.sqrt(X.shape[0])
    assert np.all(np.diff(means) >= -4 * (se[1:] + se[:-1]))


def test_y_trajectories_shape(tables_small):
    X = _y_trajectories(Model.STEINHAUS, np.arange(10), (50, 100, 150),
                        tables_small, 2, 2.5, 30.0, 200)
    assert X.shape == (10, 3)
    assert np.all(X > 0)


@pytest.mark.parametrize("model", list(Model))
@pytest.mark.parametrize("spec", ["z", "y"])
def test_doob_inequalities(tables_small, model, spec):
    kwargs = dict(trials=400) if spec == "z" else dict(trials=60, panels=150,
                                                       T=30.0,
                                                       truncations=(50, 100, 150))
    rep_max = doob_check(spec, 30.0, None, model=model, tables=tables_small,
                         **kwargs)
    assert not rep_max.violated
    rep_l2 = doob_check(spec, 30.0, 2, model=model, tables=tables_small,
                        **kwargs)
    assert not rep_l2.violated


def test_doob_rejects_unknown_spec(tables_small):
    with pytest.raises(ValueError):
        doob_check("w", 1.0, None, 100, Model.RADEMACHER, tables_small)
    with pytest.raises(ValueError):
        doob_check("z", 1.0, 3, 100, Model.RADEMACHER, tables_small)


def test_sigma_event_statistic_shape(tables_small):
    stat = sigma_event_statistic(Model.RADEMACHER, 500, 100, 10.0, tables_small,
                                 panels=200)
    qs = [stat["quantiles"][k] for k in ("0.1", "0.25", "0.5", "0.75", "0.9")]
    assert qs == sorted(qs)
    assert 0.0 <= stat["exceed_fraction"] <= 1.0
    assert stat["threshold"] == pytest.approx(2.0 * math.sqrt(10.0))
    assert stat["budget_shape"] == pytest.approx(10.0**-0.25)


def test_variance_ratio_ensemble(tables_small):
    cfg = ExperimentConfig(model=Model.STEINHAUS, trials=600, x_max=10_000)
    rows = variance_ratio_ensemble(cfg, tables_small, xs=(1000,))
    row = rows[0]
    assert not row["violated"]
    assert row["exact_ev"] == pytest.approx(
        sum(1000 // p for p in tables_small.primes_in(31, 1000).tolist())
    )
    assert row["ratio_q90"] >= row["ratio_median"] > 0


@pytest.mark.parametrize("model", list(Model))
def test_partial_sum_second_moment(tables_small, model):
    rep = partial_sum_second_moment_check(model, 200, 6000, tables_small)
    assert not rep.violated
    if model is Model.STEINHAUS:
        assert rep.bound == 200.0
