"""Rolling-window out-of-sample forecasting.

For every forecast day d the trailing `window_days` calendar days supply
the per-variable ECDFs and the regression rows (the first 7 window days are
lag burn-in).  All 24 hourly models are re-estimated; tuning parameters are
re-selected every `reselect_every` days (daily by default).  Forecasts are
mapped back to price space with the window's price ECDF.  Day-d prices
never enter the information set: their transformed values are blanked
before the design is built, so only day-d exogenous forecasts and dummies
can reach the regressors.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .errors import ConfigError, DataError, EpfregError
from .features import LAG_BURN_IN, build_arx, build_farx, forecast_rows
from .ingest import TimeSeriesPanel
from .metrics import score
from .selection import SelectionPlan, refit, select
from .transform import fit_panel_ecdfs, npit_inverse, transform_matrix


@dataclass
class BacktestConfig:
    model: str = "farx"                 # 'arx' | 'farx'
    family: str = "lasso"
    window_days: int = 728
    first_day: object = None            # default: earliest feasible day
    last_day: object = None             # default: last panel day
    selection: SelectionPlan = field(default_factory=SelectionPlan)
    reselect_every: int = 1
    per_hour_ecdf: bool = False
    standardize: bool = True
    jobs: int = 1
    keep_traces: bool = False           # retain per-candidate CV/BIC scores

    def __post_init__(self):
        if self.model not in ("arx", "farx"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.window_days < LAG_BURN_IN + 1:
            raise ConfigError(f"window must be at least {LAG_BURN_IN + 1} days")
        if self.reselect_every < 1:
            raise ConfigError("reselect_every must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


@dataclass
class ForecastRecord:
    day: object
    hour: int
    actual_price: float
    forecast_price: float
    chosen_lambda: float
    chosen_shape: float
    nnz: int


@dataclass
class BacktestResult:
    records: list
    selection_log: list      # one entry per (day, hour): chosen candidate
    config: BacktestConfig

    def score(self):
        return score(self.records)


def _resolve_range(panel, config):
    first = config.first_day
    last = config.last_day
    if first is None:
        if panel.n_days <= config.window_days:
            raise DataError("panel shorter than the calibration window")
        first = panel.days[config.window_days]
    if last is None:
        last = panel.days[-1]
    first, last = pd.Timestamp(first), pd.Timestamp(last)
    i0, i1 = panel.day_position(first), panel.day_position(last)
    if i0 > i1:
        raise ConfigError("first forecast day is after the last")
    if i0 < config.window_days:
        raise DataError(
            f"forecast day {first.date()} lacks {config.window_days} days of history")
    return i0, i1


def _window_view(panel, models, i0, i_day, per_hour):
    """Transformed slice [window start .. forecast day]; day-d price blanked."""
    days = panel.days[i0:i_day + 1]
    values = {}
    for var, mat in panel.values.items():
        values[var] = transform_matrix(models, var, mat[i0:i_day + 1], per_hour)
    values["price"][-1, :] = np.nan  # leakage guard
    return TimeSeriesPanel(market=panel.market, days=days, values=values,
                           repair_log=[])


def _one_hour(tpanel, config, hour, day, keep):
    build = build_arx if config.model == "arx" else build_farx
    window = (tpanel.days[0], tpanel.days[-2])
    dm = build(tpanel, hour, window)
    if keep is None:
        result = select(dm, config.family, config.selection, config.standardize)
        spec, fit, trace = result.spec, result.fit, result.trace
    else:
        spec, fit = refit(dm, config.family, keep[0], keep[1], config.standardize)
        trace = []
    x = forecast_rows(tpanel, config.model, hour, [day])[0]
    pred = float(x @ fit.beta)
    return spec, fit, pred, trace


def run_backtest(panel, config):
    """Forecast every (day, hour) in the configured range.

    Returns a BacktestResult whose records are ordered by (day, hour).
    Output is independent of the parallelism degree.
    """
    i_first, i_last = _resolve_range(panel, config)
    records = []
    selection_log = []
    kept = {}

    pool = ThreadPoolExecutor(max_workers=config.jobs) if config.jobs > 1 else None
    try:
        for step, i_day in enumerate(range(i_first, i_last + 1)):
            day = panel.days[i_day]
            i0 = i_day - config.window_days
            window_slice = slice(i0, i_day)
            models = fit_panel_ecdfs(panel, window_slice, config.per_hour_ecdf)
            tpanel = _window_view(panel, models, i0, i_day, config.per_hour_ecdf)
            reselect = step % config.reselect_every == 0

            def task(hour):
                keep = None if reselect else kept.get(hour)
                try:
                    return _one_hour(tpanel, config, hour, day, keep)
                except EpfregError as exc:
                    raise type(exc)(f"{exc} (day {day.date()}, hour {hour})") from exc

            hours = range(1, 25)
            outs = list(pool.map(task, hours)) if pool else [task(h) for h in hours]

            for hour, (spec, fit, pred, trace) in zip(hours, outs):
                kept[hour] = (spec.lam, spec.shape)
                if config.per_hour_ecdf:
                    price_model = models[("price", hour)]
                else:
                    price_model = models["price"]
                forecast = float(npit_inverse(price_model, pred))
                actual = float(panel.values["price"][i_day, hour - 1])
                records.append(ForecastRecord(
                    day=day.date(), hour=hour, actual_price=actual,
                    forecast_price=forecast,
                    chosen_lambda=float(spec.lam) if spec.family != "ols" else np.nan,
                    chosen_shape=np.nan if spec.shape is None else float(spec.shape),
                    nnz=fit.nnz))
                entry = {
                    "day": str(day.date()), "hour": hour,
                    "lambda": records[-1].chosen_lambda,
                    "shape": records[-1].chosen_shape,
                    "nnz": fit.nnz, "candidates": len(trace),
                    "reselected": reselect}
                if config.keep_traces and trace:
                    entry["trace"] = [(c.shape, c.lam, c.score) for c in trace]
                selection_log.append(entry)
    finally:
        if pool:
            pool.shutdown()
    return BacktestResult(records=records, selection_log=selection_log,
                          config=config)


def perturb_forecast_days(panel, first_day, scale=2.0, offset=17.0):
    """Copy of the panel with prices from `first_day` onward rewritten.

    Only used to demonstrate that forecasts depend on day-d data through
    exogenous forecasts alone.
    """
    i0 = panel.day_position(first_day)
    values = {k: v.copy() for k, v in panel.values.items()}
    values["price"][i0:] = values["price"][i0:] * scale + offset
    return replace(panel, values=values)
