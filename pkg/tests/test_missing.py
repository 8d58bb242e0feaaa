import numpy as np
import pytest

from heavytail.bayes import TuningConfig, run_mcmc
from heavytail.data import CountData
from heavytail.dist import (
    DiscreteLogNormal,
    NoDeviation,
    ParamPoint,
    PowerLaw,
    UnitExpCDF,
    model_pmf,
    norm_const,
    sample,
)
from heavytail.missing import TotalPosterior, draw_missing, impute_missing, recording_rate
from heavytail.models import M1, M3

SHORT = TuningConfig(pilot_iters=1000, main_iters=6000, burnin=1000, seed=1)


def test_rate_without_deviation():
    assert recording_rate(ParamPoint(PowerLaw(2.0))) == 1.0


def test_rate_is_normaliser(oracle):
    o = oracle["norm_const_pl2.5_uexp"]
    point = ParamPoint(PowerLaw(o["theta"]), UnitExpCDF(tuple(o["phi"])))
    assert recording_rate(point) == pytest.approx(o["value"], abs=1e-10)
    assert 0 < recording_rate(point) <= 1


def test_no_deviation_imputes_nothing():
    data = CountData.from_observations(sample(1000, ParamPoint(DiscreteLogNormal(1.0, 1.0)), seed=3))
    chain = run_mcmc(data, M3, tuning=SHORT, progress=False)
    total = impute_missing(chain, data, draws_per_sample=2, seed=4)
    assert np.all(total.events == data.n)
    assert np.all(total.casualties == data.total)
    assert total.events.std() == 0.0
    assert total.events.size == 2 * len(chain)


def test_constant_half_matches_direct_thinning():
    """D = 1/2 everywhere: on average one missing event per recorded one."""
    point = ParamPoint(PowerLaw(3.0), UnitExpCDF((np.log(2.0),)))
    rng = np.random.default_rng(0)
    n_obs = 200
    imputed = np.array([draw_missing(n_obs, point, rng)[0] for _ in range(4000)])
    assert abs(imputed.mean() - n_obs) < 4 * np.sqrt(2 * n_obs / 4000) + 1

    # forward simulation: draw events until n_obs are recorded, count the rest
    direct = []
    for _ in range(4000):
        kept = missed = 0
        while kept < n_obs:
            block = rng.random(2 * (n_obs - kept) + 8) < 0.5
            need = n_obs - kept
            idx = np.flatnonzero(block)
            if idx.size >= need:
                cut = idx[need - 1] + 1
                kept += need
                missed += cut - need
            else:
                kept += idx.size
                missed += block.size - idx.size
        direct.append(missed)
    direct = np.array(direct)
    assert abs(imputed.mean() - direct.mean()) < 1.5
    assert imputed.var() == pytest.approx(direct.var(), rel=0.1)


def test_missing_sizes_follow_defect_pmf():
    point = ParamPoint(PowerLaw(2.5), UnitExpCDF((0.1, 0.5)))
    rng = np.random.default_rng(1)
    from heavytail.dist import thinned_draws

    sizes = thinned_draws(200_000, point.tail, point.deviation.defect, rng)
    x = np.arange(1, 30)
    weights = point.tail.pmf(np.arange(1, 5000)) * point.deviation.defect(np.arange(1, 5000))
    expected = weights[:29] / weights.sum()
    freq = np.bincount(sizes, minlength=31)[1:30] / sizes.size
    assert 0.5 * np.abs(freq - expected).sum() < 0.01


def test_imputed_totals_not_below_observed():
    point = M1.make_point([2.5], [0.5, 1.0, 0.0])
    data = CountData.from_observations(sample(500, point, seed=2))
    chain = run_mcmc(data, M1, tuning=SHORT, progress=False)
    total = impute_missing(chain, data, seed=3, max_posterior_draws=300)
    assert total.events.size == 300
    assert np.all(total.events >= data.n) and np.all(total.casualties >= data.total)
    lo, hi = total.interval(0.9)
    assert lo <= hi
    d = total.to_dict()
    assert d["observed_events"] == data.n and d["total_events"]["q5"] == pytest.approx(lo)


def test_imputation_deterministic():
    point = M1.make_point([2.5], [0.5, 1.0, 0.0])
    points = [point] * 50
    data = CountData.from_observations(sample(300, point, seed=2))
    a = impute_missing(points, data, seed=9)
    b = impute_missing(points, data, seed=9)
    np.testing.assert_array_equal(a.events, b.events)
    np.testing.assert_array_equal(a.casualties, b.casualties)


def test_saturating_deviation_shrinks_spread():
    data = CountData.from_observations(sample(300, ParamPoint(PowerLaw(2.5)), seed=5))
    spreads = []
    for phi0 in (0.5, 3.0, 10.0):
        pts = [ParamPoint(PowerLaw(2.5), UnitExpCDF((phi0, 1.0)))] * 200
        t = impute_missing(pts, data, seed=1)
        spreads.append(t.events.std())
    assert spreads[0] > spreads[1] > spreads[2]
    assert spreads[2] < 0.1


def test_empty_chain_rejected():
    with pytest.raises(ValueError):
        impute_missing([], CountData.from_observations([1]))
