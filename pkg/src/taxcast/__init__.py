"""Tax-revenue forecasting toolkit.

Unit-root testing, ARIMA baselines, Granger-screened scenario regressions
and forecast-accuracy comparison for short annual revenue series.
"""

from .accuracy import AccuracyReport, compare_models, dm_test, error_stats, theil_u1
from .arima import ArimaModel, acf, fit_arima, forecast, pacf, rank_orders, select_order
from .causality import GrangerResult, granger_test
from .errors import TaxcastError
from .linreg import DesignMatrix, RegressionFit, f_test_nested, ols_fit, predict
from .scenario import ScenarioForecast, ScenarioSpec, fit_scenario, project, screen_drivers, summarize_growth
from .series import AnnualSeries, GrowthPath, apply_growth_path, difference, integrate, pct_change
from .stationarity import AdfResult, AdfSpec, adf_test, recommend_d

__version__ = "0.1.0"
