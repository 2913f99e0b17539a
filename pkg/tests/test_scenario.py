import numpy as np
import pytest

from taxcast.errors import ConfigurationError, InsufficientDataError, SingularDesignError
from taxcast.linreg import DesignMatrix, predict
from taxcast.scenario import ScenarioSpec, fit_scenario, project, screen_drivers, summarize_growth
from taxcast.series import AnnualSeries, GrowthPath, pct_change


def _spec(target, drivers, paths, horizon=2, **kw):
    return ScenarioSpec("T", target, list(drivers.items()), paths, horizon, **kw)


def _noisy_drivers(rng, n=15, start=2000):
    a = AnnualSeries(start, 100 + np.cumsum(rng.normal(2, 1, n)))
    b = AnnualSeries(start, 50 + np.cumsum(rng.normal(1, 1, n)))
    return a, b


def test_exact_linear_law(rng):
    a, b = _noisy_drivers(rng)
    target = AnnualSeries(2000, 2 * a.values + 3 * b.values)
    fit = fit_scenario(_spec(target, {"a": a, "b": b}, {}))
    assert np.allclose(fit.beta, [0, 2, 3], atol=1e-8)
    assert np.max(np.abs(fit.residuals)) < 1e-9


def test_single_driver_equal_to_target(rng):
    a, _ = _noisy_drivers(rng)
    fit = fit_scenario(_spec(a, {"a": a}, {}))
    assert np.allclose(fit.beta, [0, 1], atol=1e-9)


def test_projection_through_exact_law():
    d = AnnualSeries(2010, [80.0, 85, 90, 92, 95, 96, 98, 100])
    spec = _spec(AnnualSeries(2010, 2 * d.values), {"d": d}, {"d": GrowthPath(2018, [0.1, 0.1, 0.1])}, horizon=3)
    fc = project(spec, fit_scenario(spec))
    assert fc.projected_levels.start_year == 2018
    assert np.allclose(fc.projected_levels.values, [220, 242, 266.2])
    assert np.allclose(fc.driver_levels["d"].values, [110, 121, 133.1])


def test_zero_growth_freezes_projection(rng):
    a, b = _noisy_drivers(rng)
    target = AnnualSeries(2000, 1.5 * a.values - b.values + rng.standard_normal(15))
    paths = {"a": GrowthPath(2015, [0, 0, 0]), "b": GrowthPath(2015, [0, 0, 0])}
    spec = _spec(target, {"a": a, "b": b}, paths, horizon=3)
    fit = fit_scenario(spec)
    fc = project(spec, fit)
    at_base = predict(fit, DesignMatrix.from_columns({"a": [a.at(2014)], "b": [b.at(2014)]}))[0]
    assert np.allclose(fc.projected_levels.values, at_base, rtol=1e-12)


def test_forecast_invariants(rng):
    a, b = _noisy_drivers(rng)
    target = AnnualSeries(2000, a.values + rng.standard_normal(15) * 5)
    paths = {"a": GrowthPath(2015, [0.02, 0.03]), "b": GrowthPath(2015, [0.01, 0.0])}
    spec = _spec(target, {"a": a, "b": b}, paths)
    assert spec.base_year == 2014
    fc = project(spec, fit_scenario(spec))
    assert len(fc.projected_levels) == 2 and fc.projected_levels.start_year == 2015
    assert np.allclose(fc.in_sample_predicted.values + fc.residuals.values, target.values, rtol=1e-15, atol=0)
    assert fc.actual.start_year == target.start_year


def test_missing_path_names_driver(rng):
    a, b = _noisy_drivers(rng)
    spec = _spec(a, {"a": a, "b": b}, {"a": GrowthPath(2015, [0.0, 0.0])})
    with pytest.raises(ConfigurationError, match="'b'"):
        project(spec, fit_scenario(spec))


def test_short_path_and_wrong_start(rng):
    a, b = _noisy_drivers(rng)
    spec = _spec(a, {"b": b}, {"b": GrowthPath(2015, [0.0])}, horizon=2)
    with pytest.raises(ConfigurationError):
        project(spec, fit_scenario(spec))
    spec = _spec(a, {"b": b}, {"b": GrowthPath(2016, [0.0, 0.0])})
    with pytest.raises(ConfigurationError):
        project(spec, fit_scenario(spec))


def test_spec_validation(rng):
    a, b = _noisy_drivers(rng)
    with pytest.raises(ConfigurationError):
        _spec(a, {"a": a}, {}, base_year=2010)
    with pytest.raises(ConfigurationError):
        _spec(a, {}, {})
    with pytest.raises(ConfigurationError):
        ScenarioSpec("T", a, [("b", b), ("b", b)], {}, 1)


def test_short_window():
    d = AnnualSeries(2000, [1.0, 2, 4, 3, 5])
    with pytest.raises(InsufficientDataError):
        fit_scenario(_spec(AnnualSeries(2000, [2.0, 3, 5, 4, 7]), {"d": d, "e": AnnualSeries(2000, [1.0, 0, 1, 1, 0])}, {}))


def test_replaying_history_reproduces_fit(rng):
    a, b = _noisy_drivers(rng)
    target = AnnualSeries(2000, 0.7 * a.values + 2 * b.values + rng.standard_normal(15))
    origin = 2006
    paths = {
        name: GrowthPath(origin + 1, pct_change(s).window(origin + 1, 2014).values)
        for name, s in (("a", a), ("b", b))
    }
    spec = _spec(target, {"a": a, "b": b}, paths, horizon=8)
    fc = project(spec, fit_scenario(spec), from_year=origin)
    expected = fc.in_sample_predicted.window(origin + 1, 2014).values
    assert np.allclose(fc.projected_levels.values, expected, rtol=1e-12)


def test_monotone_response(rng):
    a, b = _noisy_drivers(rng)
    target = AnnualSeries(2000, 2 * a.values - 3 * b.values + rng.standard_normal(15))
    low = {"a": GrowthPath(2015, [0.01, 0.01, 0.01]), "b": GrowthPath(2015, [0.01, 0.01, 0.01])}
    high_a = dict(low, a=GrowthPath(2015, [0.05, 0.05, 0.05]))
    high_b = dict(low, b=GrowthPath(2015, [0.05, 0.05, 0.05]))
    base_spec = _spec(target, {"a": a, "b": b}, low, horizon=3)
    fit = fit_scenario(base_spec)
    base = project(base_spec, fit).projected_levels.values
    up_a = project(_spec(target, {"a": a, "b": b}, high_a, horizon=3), fit).projected_levels.values
    up_b = project(_spec(target, {"a": a, "b": b}, high_b, horizon=3), fit).projected_levels.values
    assert fit.beta[1] > 0 and np.all(up_a > base)
    assert fit.beta[2] < 0 and np.all(up_b < base)


def test_rescaling_driver_leaves_projection(rng):
    a, b = _noisy_drivers(rng)
    target = AnnualSeries(2000, a.values + b.values + rng.standard_normal(15))
    paths = {"a": GrowthPath(2015, [0.03, 0.02]), "b": GrowthPath(2015, [0.0, 0.04])}
    spec = _spec(target, {"a": a, "b": b}, paths)
    scaled = _spec(target, {"a": AnnualSeries(2000, 1e3 * a.values), "b": b}, paths)
    f1, f2 = fit_scenario(spec), fit_scenario(scaled)
    assert f2.beta[1] == pytest.approx(f1.beta[1] / 1e3, rel=1e-9)
    assert np.allclose(project(spec, f1).projected_levels.values, project(scaled, f2).projected_levels.values, rtol=1e-10)


def test_summarize_growth_examples():
    d = AnnualSeries(2010, [70.0, 80, 85, 90, 95, 100])
    spec = _spec(d, {"d": d}, {"d": GrowthPath(2016, [0.1, 0.1])})
    fc = project(spec, fit_scenario(spec))
    g = summarize_growth(fc)
    assert g.base_value == pytest.approx(100)
    assert np.allclose(list(g.yearly.values()), [0.1, 0.1]) and g.cumulative == pytest.approx(0.21)
    flat = _spec(d, {"d": d}, {"d": GrowthPath(2016, [0.0, 0.0])})
    g0 = summarize_growth(project(flat, fit_scenario(flat)))
    assert np.allclose(list(g0.yearly.values()), 0, atol=1e-12) and abs(g0.cumulative) < 1e-12


def test_summarize_growth_bases_differ(rng):
    a, _ = _noisy_drivers(rng)
    target = AnnualSeries(2000, a.values + rng.normal(0, 3, 15))
    spec = _spec(target, {"a": a}, {"a": GrowthPath(2015, [0.0, 0.0])})
    fc = project(spec, fit_scenario(spec))
    fitted, actual = summarize_growth(fc, "fitted"), summarize_growth(fc, "actual")
    assert actual.base_value == pytest.approx(target.at(2014))
    assert fitted.base_value == pytest.approx(fc.in_sample_predicted.at(2014))
    with pytest.raises(ValueError):
        summarize_growth(fc, "median")


def test_screen_flags_noise_driver():
    rng = np.random.default_rng(42)
    flagged = 0
    for _ in range(500):
        t = AnnualSeries(1960, np.cumsum(rng.standard_normal(60)))
        noise = AnnualSeries(1960, np.cumsum(rng.standard_normal(60)))
        spec = _spec(t, {"noise": noise}, {})
        flagged += not screen_drivers(spec)["noise"].causal_at_5pct
    assert flagged / 500 >= 0.90


def test_screen_detects_lagged_driver(rng):
    x = np.cumsum(rng.standard_normal(60))
    dx = np.diff(x)
    dy = 0.3 * rng.standard_normal(59)
    dy[1:] += 0.9 * dx[:-1]
    y = np.concatenate(([0.0], np.cumsum(dy)))
    spec = _spec(AnnualSeries(1960, y), {"x": AnnualSeries(1960, x)}, {})
    res = screen_drivers(spec)["x"]
    assert res.causal_at_5pct and res.direction == ("x", "T")


def test_screen_duplicate_target_is_singular(rng):
    # the driver's lags coincide with the target's own lags, so the
    # unrestricted design has duplicated columns
    t = AnnualSeries(1960, np.cumsum(rng.standard_normal(40)))
    with pytest.raises(SingularDesignError):
        screen_drivers(_spec(t, {"copy": t}, {}))


def test_screen_leading_copy_is_perfect(rng):
    y = np.cumsum(rng.standard_normal(41))
    spec = _spec(AnnualSeries(1960, y[:-1]), {"lead": AnnualSeries(1960, y[1:])}, {})
    res = screen_drivers(spec)["lead"]
    assert res.f_test.p_value < 1e-10


def test_screen_needs_length():
    from taxcast.tables import pit_scenario_spec

    with pytest.raises(InsufficientDataError):
        screen_drivers(pit_scenario_spec())
