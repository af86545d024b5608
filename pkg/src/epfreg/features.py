"""Per-hour regression problems from a transformed panel.

Column order is part of the contract.

ARX (17 columns for EPEX, 16 for OMIE; the response is the transformed
price at the target hour):

    price_lag1, price_lag2, price_lag7        same-hour price lags
    price_max_lag1, price_min_lag1            previous day's extremes
    price_last_hour                           previous day, hour 24
    load, solar, wind_on[, wind_off]          day-d exogenous forecasts
    dow_mon .. dow_sun                        7 weekday dummies

fARX (277 / 229 columns):

    price_lag{i}_h{hh}   for i in (1, 2, 7), hh in 01..24      (72)
    price_max_lag{i}     for i in 1..3                          (3)
    price_min_lag{i}     for i in 1..3                          (3)
    {var}_lag{i}_h{hh}   for var in (load, solar, wind_on
                         [, wind_off]), i in (0, 1), hh 01..24  (192 / 144)
    dow_mon .. dow_sun                                          (7)

All fARX regressors are hour-agnostic: the matrix X is identical for every
target hour, only the response changes.  Price extremes are taken over
transformed prices.  Rows start at the 8th day of the window so every lag
exists; there is no intercept (the dummies span it).
"""

import csv
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigError, DataError
from .ingest import variables_for

DOW_LABELS = ("dow_mon", "dow_tue", "dow_wed", "dow_thu",
              "dow_fri", "dow_sat", "dow_sun")
LAG_BURN_IN = 7


@dataclass
class DesignMatrix:
    hour: int
    y: np.ndarray
    X: np.ndarray
    labels: list
    day_index: pd.DatetimeIndex
    dummy_mask: np.ndarray


def _exog_vars(market):
    return tuple(v for v in variables_for(market) if v != "price")


def arx_labels(market):
    labels = ["price_lag1", "price_lag2", "price_lag7",
              "price_max_lag1", "price_min_lag1", "price_last_hour"]
    labels += list(_exog_vars(market))
    labels += list(DOW_LABELS)
    return labels


def farx_labels(market):
    labels = [f"price_lag{i}_h{hh:02d}" for i in (1, 2, 7) for hh in range(1, 25)]
    labels += [f"price_max_lag{i}" for i in (1, 2, 3)]
    labels += [f"price_min_lag{i}" for i in (1, 2, 3)]
    for var in _exog_vars(market):
        labels += [f"{var}_lag{i}_h{hh:02d}" for i in (0, 1) for hh in range(1, 25)]
    labels += list(DOW_LABELS)
    return labels


def _dummies(days):
    out = np.zeros((len(days), 7))
    out[np.arange(len(days)), days.dayofweek] = 1.0
    return out


def _positions(panel, days):
    return np.array([panel.day_position(d) for d in days])


def _resolve_window(panel, window):
    if isinstance(window, tuple) and len(window) == 2:
        i0 = panel.day_position(window[0])
        i1 = panel.day_position(window[1])
        days = panel.days[i0:i1 + 1]
    else:
        days = pd.DatetimeIndex(window)
    if len(days) < LAG_BURN_IN + 1:
        raise ConfigError(f"window must contain at least {LAG_BURN_IN + 1} days")
    return days


def arx_rows(panel, hour, days):
    """ARX regressor rows for the given target days (lags must exist)."""
    if not 1 <= hour <= 24:
        raise ConfigError(f"hour {hour} outside 1..24")
    idx = _positions(panel, days)
    if idx.min() < LAG_BURN_IN:
        raise DataError("target day lacks 7 days of lag history")
    pm = panel.values["price"]
    h = hour - 1
    cols = [pm[idx - 1, h], pm[idx - 2, h], pm[idx - 7, h],
            pm[idx - 1].max(axis=1), pm[idx - 1].min(axis=1), pm[idx - 1, 23]]
    for var in _exog_vars(panel.market):
        cols.append(panel.values[var][idx, h])
    X = np.column_stack(cols + [_dummies(pd.DatetimeIndex(days))])
    return X


def farx_rows(panel, hour, days):
    """fARX regressor rows; identical for every target hour."""
    if not 1 <= hour <= 24:
        raise ConfigError(f"hour {hour} outside 1..24")
    idx = _positions(panel, days)
    if idx.min() < LAG_BURN_IN:
        raise DataError("target day lacks 7 days of lag history")
    pm = panel.values["price"]
    blocks = [pm[idx - i] for i in (1, 2, 7)]
    blocks.append(np.column_stack([pm[idx - i].max(axis=1) for i in (1, 2, 3)]))
    blocks.append(np.column_stack([pm[idx - i].min(axis=1) for i in (1, 2, 3)]))
    for var in _exog_vars(panel.market):
        vm = panel.values[var]
        blocks.append(vm[idx])
        blocks.append(vm[idx - 1])
    blocks.append(_dummies(pd.DatetimeIndex(days)))
    return np.concatenate(blocks, axis=1)


def _build(panel, hour, window, rows_fn, labels_fn):
    days = _resolve_window(panel, window)
    target = days[LAG_BURN_IN:]
    X = rows_fn(panel, hour, target)
    labels = labels_fn(panel.market)
    if X.shape[1] != len(labels):
        raise AssertionError("label/column mismatch")
    idx = _positions(panel, target)
    y = panel.values["price"][idx, hour - 1]
    if not np.all(np.isfinite(y)):
        raise DataError("response contains non-finite values inside the window")
    dummy_mask = np.array([lab.startswith("dow_") for lab in labels])
    return DesignMatrix(hour=hour, y=y, X=X, labels=labels,
                        day_index=pd.DatetimeIndex(target), dummy_mask=dummy_mask)


def build_arx(panel, hour, window):
    """ARX problem over the window; rows cover window days 8..end."""
    return _build(panel, hour, window, arx_rows, arx_labels)


def build_farx(panel, hour, window):
    """fARX problem over the window; rows cover window days 8..end."""
    return _build(panel, hour, window, farx_rows, farx_labels)


def forecast_rows(panel, model, hour, days):
    """Regressor rows for out-of-window target days (no response needed)."""
    rows_fn = arx_rows if model == "arx" else farx_rows
    return rows_fn(panel, hour, pd.DatetimeIndex(days))


def dump_csv(dm, path):
    """Debug dump: labels as header, response in the first column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "y", *dm.labels])
        for i, day in enumerate(dm.day_index):
            writer.writerow([day.date(), repr(float(dm.y[i])),
                             *(repr(float(v)) for v in dm.X[i])])
