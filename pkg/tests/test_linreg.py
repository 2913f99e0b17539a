import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from taxcast.errors import ArityError, InsufficientDataError, InvalidNestingError, SingularDesignError
from taxcast.linreg import DesignMatrix, RegressionFit, f_test_nested, ols_fit, predict


def _fake_fit(ssr, n, k):
    resid = np.zeros(n)
    resid[0] = np.sqrt(ssr)
    return RegressionFit(
        beta=np.zeros(k), residuals=resid, sigma2=ssr / (n - k), se_beta=np.zeros(k),
        r_squared=0.0, n_obs=n, n_params=k, column_names=tuple(f"x{i}" for i in range(k)),
        fitted=np.zeros(n),
    )


def test_exact_line():
    fit = ols_fit(np.array([[1, 1], [1, 2], [1, 3.0]]), [2, 4, 6])
    assert np.allclose(fit.beta, [0, 2], atol=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_mean_fit():
    fit = ols_fit(np.ones((3, 1)), [3, 5, 7])
    assert fit.beta[0] == pytest.approx(5.0)
    assert np.allclose(fit.residuals, [-2, 0, 2])
    assert fit.sigma2 == pytest.approx(4.0)


def test_duplicate_column_is_singular():
    with pytest.raises(SingularDesignError) as err:
        DesignMatrix.from_columns({"a": [1, 2, 3, 4.0], "b": [1, 2, 3, 4.0]})
    assert err.value.column == "b"


def test_collinear_column_is_named():
    x = np.arange(10.0)
    X = DesignMatrix.from_columns({"a": x, "b": 2 * x + 1})
    with pytest.raises(SingularDesignError) as err:
        ols_fit(X, np.sin(x))
    assert err.value.column == "b"


def test_too_few_rows():
    with pytest.raises(InsufficientDataError):
        ols_fit(np.eye(2), [1.0, 2.0])


def test_matches_lstsq_and_textbook_se(rng):
    X = np.column_stack((np.ones(40), rng.standard_normal((40, 3))))
    y = X @ [1.0, 2.0, -1.0, 0.5] + rng.standard_normal(40)
    fit = ols_fit(X, y)
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    assert np.allclose(fit.beta, beta, atol=1e-12)
    # textbook covariance as an independent route
    cov = fit.sigma2 * np.linalg.inv(X.T @ X)
    assert np.allclose(fit.se_beta, np.sqrt(np.diag(cov)), rtol=1e-10)
    assert abs(fit.residuals.sum()) <= 1e-8 * np.linalg.norm(y)
    assert 0.0 <= fit.r_squared <= 1.0


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3))
def test_orthogonality_and_scale_equivariance(seed, c):
    rng = np.random.default_rng(seed)
    X = np.column_stack((np.ones(25), rng.standard_normal((25, 3))))
    y = rng.standard_normal(25) * 10
    fit = ols_fit(X, y)
    assert np.max(np.abs(X.T @ fit.residuals)) <= 1e-8 * np.linalg.norm(y)
    scaled = ols_fit(X, c * y)
    assert np.allclose(scaled.beta, c * fit.beta, rtol=1e-9, atol=1e-9 * abs(c))
    assert np.allclose(scaled.residuals, c * fit.residuals, rtol=1e-9, atol=1e-9 * abs(c))
    assert np.allclose(predict(fit, X) + fit.residuals, y, rtol=0, atol=1e-12 * np.abs(y).max())


def test_noise_column_never_raises_ssr(rng):
    X = np.column_stack((np.ones(30), rng.standard_normal(30)))
    y = rng.standard_normal(30)
    small = ols_fit(X, y)
    big = ols_fit(np.column_stack((X, rng.standard_normal(30))), y)
    assert big.ssr <= small.ssr


def test_predict_examples():
    fit = ols_fit(np.array([[1, 1], [1, 2], [1, 3.0]]), [2, 4, 6])
    assert predict(fit, np.array([[1, 4.0]]))[0] == pytest.approx(8.0)
    fit1 = ols_fit(np.ones((3, 1)), [3, 5, 7])
    assert np.allclose(predict(fit1, np.ones((2, 1))), [5, 5])
    fit3 = RegressionFit(np.array([1, -1, 0.5]), np.zeros(4), 1.0, np.zeros(3), 0.0, 4, 3, ("x0", "x1", "x2"), np.zeros(4))
    assert predict(fit3, np.array([[1, 2, 4.0]]))[0] == pytest.approx(1.0)
    with pytest.raises(ArityError):
        predict(fit, np.array([[1, 2, 3.0]]))


def test_predict_checks_column_order():
    X = DesignMatrix.from_columns({"a": [1, 2, 3, 4.0], "b": [0, 1, 0, 2.0]})
    fit = ols_fit(X, [1, 2, 2, 5.0])
    swapped = DesignMatrix(X.values[:, [0, 2, 1]], ("const", "b", "a"))
    with pytest.raises(ArityError):
        predict(fit, swapped)


def test_f_test_hand_values():
    r = f_test_nested(_fake_fit(20.0, 12, 1), _fake_fit(10.0, 12, 2))
    assert r.f_stat == pytest.approx(10.0)
    assert (r.df_num, r.df_den) == (1, 10)
    assert r.p_value == pytest.approx(stats.f.sf(10.0, 1, 10), rel=1e-10)
    same = f_test_nested(_fake_fit(10.0, 12, 1), _fake_fit(10.0, 12, 2))
    assert same.f_stat == 0.0 and same.p_value == 1.0


def test_f_test_perfect_fit_caps():
    r = f_test_nested(_fake_fit(5.0, 12, 1), _fake_fit(0.0, 12, 2))
    assert np.isfinite(r.f_stat) and r.p_value < 1e-12


def test_f_test_rejects_bad_nesting():
    with pytest.raises(InvalidNestingError):
        f_test_nested(_fake_fit(5.0, 12, 1), _fake_fit(9.0, 12, 2))
    with pytest.raises(InvalidNestingError):
        f_test_nested(_fake_fit(5.0, 12, 2), _fake_fit(4.0, 12, 2))


def test_f_p_value_decreases_in_f():
    ps = [f_test_nested(_fake_fit(10 + g, 20, 2), _fake_fit(10.0, 20, 4)).p_value for g in range(0, 30, 3)]
    assert all(a > b for a, b in zip(ps, ps[1:]))
