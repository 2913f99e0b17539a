import numpy as np
import pytest

from taxcast.errors import DegenerateSeriesError, InsufficientDataError, NonRejectionWarning
from taxcast.series import AnnualSeries
from taxcast.stationarity import (
    AdfSpec,
    adf_test,
    critical_values,
    monte_carlo_critical_values,
    recommend_d,
    schwert_max_lag,
)


def _ar1(rng, phi, n=200):
    x = np.zeros(n)
    e = rng.standard_normal(n)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + e[t]
    return AnnualSeries(0, x)


def test_schwert_rule():
    assert schwert_max_lag(200) == 14
    assert schwert_max_lag(100) == 12
    assert AdfSpec().resolved_max_lag(20) == 8


def test_reject_rule_and_monotone_cvs(random_walk):
    res = adf_test(random_walk)
    assert all(res.reject_at[k] == (res.tau_stat < v) for k, v in res.critical_values.items())
    cv = res.critical_values
    assert cv["1%"] < cv["5%"] < cv["10%"]


def test_constant_series_is_degenerate():
    with pytest.raises(DegenerateSeriesError):
        adf_test(AnnualSeries(0, np.full(30, 5.0)))


def test_too_short():
    with pytest.raises(InsufficientDataError):
        adf_test(AnnualSeries(0, np.arange(15.0)), AdfSpec(max_lag=4))


def test_tau_matches_statsmodels_fixed_lag(rng):
    sm = pytest.importorskip("statsmodels.tsa.stattools")
    x = np.cumsum(rng.standard_normal(150))
    for det, reg in (("none", "n"), ("constant", "c"), ("constant_and_trend", "ct")):
        ours = adf_test(AnnualSeries(0, x), AdfSpec(det, max_lag=3, lag_selection="fixed"))
        theirs = sm.adfuller(x, maxlag=3, regression=reg, autolag=None)
        assert ours.tau_stat == pytest.approx(theirs[0], rel=1e-9)
        assert ours.n_effective == theirs[3]


def test_offset_invariance(random_walk):
    for det in ("constant", "constant_and_trend"):
        a = adf_test(random_walk, AdfSpec(det))
        b = adf_test(AnnualSeries(0, random_walk.values + 1e4), AdfSpec(det))
        assert a.tau_stat == pytest.approx(b.tau_stat, rel=1e-8)
        assert a.chosen_lag == b.chosen_lag


def test_deterministic(random_walk):
    a, b = adf_test(random_walk), adf_test(random_walk)
    assert a.tau_stat == b.tau_stat and a.chosen_lag == b.chosen_lag


def test_surface_matches_statsmodels_constants():
    sm = pytest.importorskip("statsmodels.tsa.adfvalues")
    for det, reg in (("none", "n"), ("constant", "c"), ("constant_and_trend", "ct")):
        for n in (25, 100, 500):
            ref = sm.mackinnoncrit(1, reg, n)
            ours = critical_values(det, n)
            assert np.allclose([ours["1%"], ours["5%"], ours["10%"]], ref, atol=1e-9)


@pytest.mark.parametrize("det", ["none", "constant", "constant_and_trend"])
@pytest.mark.parametrize("n", [25, 200])
def test_surface_matches_monte_carlo(det, n):
    mc = monte_carlo_critical_values(det, n, reps=100_000, seed=7)
    cv = critical_values(det, n)
    for k in cv:
        assert abs(mc[k] - cv[k]) < 0.05, (det, n, k, mc[k], cv[k])


def test_power_against_ar1():
    rng = np.random.default_rng(3)
    hits = sum(adf_test(_ar1(rng, 0.5)).reject_at["5%"] for _ in range(1000))
    assert hits / 1000 >= 0.80


def test_size_at_each_level():
    rng = np.random.default_rng(11)
    counts = {"1%": 0, "5%": 0, "10%": 0}
    reps = 2000
    for _ in range(reps):
        res = adf_test(AnnualSeries(0, np.cumsum(rng.standard_normal(200))))
        for k in counts:
            counts[k] += res.reject_at[k]
    for k, c in counts.items():
        assert abs(c / reps - float(k[:-1]) / 100) <= 0.025, (k, c / reps)


def test_recommend_d(rng):
    assert recommend_d(_ar1(rng, 0.3)) == 0
    assert recommend_d(AnnualSeries(0, np.cumsum(rng.standard_normal(200)))) == 1


def test_recommend_d_warns_when_nothing_rejects():
    # a cubic trend with tiny noise survives two differences as a trend
    rng = np.random.default_rng(0)
    x = np.cumsum(np.cumsum(np.cumsum(rng.standard_normal(60))))
    with pytest.warns(NonRejectionWarning):
        assert recommend_d(AnnualSeries(0, x), spec=AdfSpec(max_lag=2, lag_selection="fixed")) == 2


def test_recommend_d_needs_length():
    # the ten reconstructed fixture years are too short for any ADF
    from taxcast.tables import pit_history

    with pytest.raises(InsufficientDataError):
        recommend_d(pit_history())
