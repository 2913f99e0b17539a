import numpy as np
import pytest

from taxcast.causality import align, granger_test
from taxcast.errors import AlignmentError, InsufficientDataError
from taxcast.linreg import DesignMatrix, ols_fit
from taxcast.series import AnnualSeries


def _causal_pair(rng, n=300):
    x = rng.standard_normal(n + 1)
    y = 0.9 * x[:-1] + rng.standard_normal(n)
    return AnnualSeries(1, x[1:]), AnnualSeries(1, y)


def test_restricted_and_unrestricted_by_hand(rng):
    x, y = _causal_pair(rng, 60)
    res = granger_test(x, y, 2)
    yv, xv = y.values, x.values
    own = np.column_stack((np.ones(58), yv[1:-1], yv[:-2]))
    full = np.column_stack((own, xv[1:-1], xv[:-2]))
    ssr_r = ols_fit(own, yv[2:]).ssr
    ssr_u = ols_fit(full, yv[2:]).ssr
    f = ((ssr_r - ssr_u) / 2) / (ssr_u / (58 - 5))
    assert res.f_test.f_stat == pytest.approx(f, rel=1e-10)
    assert (res.f_test.df_num, res.f_test.df_den) == (2, 53)
    assert res.causal_at_5pct == (res.f_test.p_value < 0.05)


@pytest.mark.filterwarnings("ignore::FutureWarning")
def test_matches_statsmodels(rng):
    sm = pytest.importorskip("statsmodels.tsa.stattools")
    x, y = _causal_pair(rng, 80)
    ours = granger_test(x, y, 2)
    out = sm.grangercausalitytests(np.column_stack((y.values, x.values)), [2])
    f, p, *_ = out[2][0]["ssr_ftest"]
    assert ours.f_test.f_stat == pytest.approx(f, rel=1e-9)
    assert ours.f_test.p_value == pytest.approx(p, rel=1e-8)


def test_detection_and_size():
    rng = np.random.default_rng(42)
    hits = false_pos = backwards = 0
    for _ in range(500):
        x, y = _causal_pair(rng)
        forward = granger_test(x, y, 2).causal_at_5pct
        hits += forward
        backwards += forward and not granger_test(y, x, 2).causal_at_5pct
        u = AnnualSeries(0, rng.standard_normal(300))
        v = AnnualSeries(0, rng.standard_normal(300))
        false_pos += granger_test(u, v, 2).causal_at_5pct
    assert hits / 500 >= 0.95
    assert false_pos / 500 <= 0.08
    assert backwards / 500 >= 0.80


def test_shifted_copy_is_perfect_fit(rng):
    y = rng.standard_normal(40)
    x = AnnualSeries(2000, y[1:])  # x in year t equals y in year t + 1
    res = granger_test(x, AnnualSeries(2000, y), 1)
    assert res.f_test.p_value < 1e-10 and res.causal_at_5pct


def test_scale_invariance(rng):
    x, y = _causal_pair(rng, 50)
    base = granger_test(x, y, 1).f_test.f_stat
    scaled = granger_test(AnnualSeries(1, 1e4 * x.values), AnnualSeries(1, 3e-3 * y.values), 1)
    assert scaled.f_test.f_stat == pytest.approx(base, rel=1e-8)


def test_alignment_trims_and_rejects():
    a = AnnualSeries(2000, np.arange(20.0))
    b = AnnualSeries(2005, np.arange(20.0))
    ta, tb = align(a, b)
    assert (ta.start_year, ta.end_year) == (2005, 2019) == (tb.start_year, tb.end_year)
    with pytest.raises(AlignmentError):
        align(a, AnnualSeries(2030, [1.0]))


def test_short_series():
    rng = np.random.default_rng(0)
    with pytest.raises(InsufficientDataError):
        granger_test(AnnualSeries(0, rng.standard_normal(12)), AnnualSeries(0, rng.standard_normal(12)), 1)


def test_same_names_do_not_collide(rng):
    x, y = _causal_pair(rng, 40)
    assert granger_test(x, y, 1, names=("PIT", "PIT")).direction == ("PIT", "PIT")
