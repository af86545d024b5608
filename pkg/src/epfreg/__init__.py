"""Penalized least-squares day-ahead electricity price forecasting.

Ten regularization families (adaptive LASSO, clipped LASSO, concave
potential, elastic net, FLASH, LASSO, LQ, MC+, ridge, SCAD) fitted by
coordinate descent with exact scalar proximal maps, tuned by blocked
cross-validation or BIC, applied through a rank-based variance-stabilizing
transform and ARX / fARX hourly model structures in a rolling-window
backtest.
"""

__version__ = "0.1.0"

from .backtest import BacktestConfig, BacktestResult, ForecastRecord, run_backtest
from .features import DesignMatrix, build_arx, build_farx
from .ingest import TimeSeriesPanel, load_panel, save_panel
from .metrics import ScoreReport, rmse, rrmse, score
from .penalties import PenaltySpec, penalty_value, scalar_prox
from .selection import SelectionPlan, select_bic, select_cv
from .solver import (
    FitResult,
    PathResult,
    default_lambda_grid,
    fit_flash,
    fit_ols,
    fit_path,
    fit_penalized,
    lambda_max,
)
from .synthetic import make_panel
from .transform import EcdfModel, fit_ecdf, npit_forward, npit_inverse

__all__ = [
    "BacktestConfig", "BacktestResult", "ForecastRecord", "run_backtest",
    "DesignMatrix", "build_arx", "build_farx",
    "TimeSeriesPanel", "load_panel", "save_panel",
    "ScoreReport", "rmse", "rrmse", "score",
    "PenaltySpec", "penalty_value", "scalar_prox",
    "SelectionPlan", "select_bic", "select_cv",
    "FitResult", "PathResult", "default_lambda_grid", "fit_flash", "fit_ols",
    "fit_path", "fit_penalized", "lambda_max",
    "make_panel",
    "EcdfModel", "fit_ecdf", "npit_forward", "npit_inverse",
    "__version__",
]
