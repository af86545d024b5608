"""Load hourly market CSVs, validate the calendar, repair DST artifacts.

CSV schema: one row per (date, hour) with an ISO date, an integer hour in
1..24, and one column per market variable:

    EPEX:  date,hour,price,load,solar,wind_on,wind_off
    OMIE:  date,hour,price,load,solar,wind_on

A missing hour (absent row or empty field) is repaired with the arithmetic
mean of the immediately preceding and following hour of the same variable in
chronological order; at the very start or end of the series the single
available neighbor is used.  Two rows sharing (date, hour) — the autumn
clock change — are averaged.  Two or more consecutive missing hours, or more
than two rows for one (date, hour), are data errors: the repair rule does
not extend further and we fail loudly instead of guessing.
"""

import csv
import datetime as dt
import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataError, ParseError, SchemaError

MARKET_VARIABLES = {
    "EPEX": ("price", "load", "solar", "wind_on", "wind_off"),
    "OMIE": ("price", "load", "solar", "wind_on"),
}


def variables_for(market):
    try:
        return MARKET_VARIABLES[market.upper()]
    except KeyError:
        raise DataError(f"unknown market {market!r}") from None


@dataclass
class TimeSeriesPanel:
    market: str
    days: pd.DatetimeIndex
    values: dict = field(repr=False)
    repair_log: list = field(default_factory=list, repr=False)

    @property
    def n_days(self):
        return len(self.days)

    def day_position(self, day):
        ts = pd.Timestamp(day)
        pos = self.days.searchsorted(ts)
        if pos >= len(self.days) or self.days[pos] != ts:
            raise DataError(f"day {ts.date()} not in panel")
        return int(pos)


def _parse_rows(path, variables):
    cells = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        expected = ["date", "hour", *variables]
        unknown = [h for h in header if h not in expected]
        if unknown:
            raise SchemaError(f"unknown column(s) {unknown} for this market")
        missing = [h for h in expected if h not in header]
        if missing:
            raise SchemaError(f"missing column(s) {missing}")
        col = {name: header.index(name) for name in expected}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(line_no, f"expected {len(header)} fields, got {len(row)}")
            try:
                day = dt.date.fromisoformat(row[col["date"]].strip())
            except ValueError:
                raise ParseError(line_no, f"bad date {row[col['date']]!r}") from None
            try:
                hour = int(row[col["hour"]].strip())
            except ValueError:
                raise ParseError(line_no, f"bad hour {row[col['hour']]!r}") from None
            if not 1 <= hour <= 24:
                raise ParseError(line_no, f"hour {hour} outside 1..24")
            vals = {}
            for var in variables:
                text = row[col[var]].strip()
                if text == "":
                    vals[var] = np.nan
                    continue
                try:
                    vals[var] = float(text)
                except ValueError:
                    raise ParseError(line_no, f"bad value {text!r} in {var}") from None
            cells.setdefault((day, hour), []).append(vals)
    if not cells:
        raise DataError(f"{path}: no data rows")
    return cells


def _repair_series(series, days, var, log):
    """Impute isolated NaNs in a flattened hourly series, in place."""
    n = series.shape[0]
    nan = ~np.isfinite(series)
    if not nan.any():
        return
    idx = np.flatnonzero(nan)
    runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
    for run in runs:
        if run.size >= 2:
            d, h = divmod(int(run[0]), 24)
            raise DataError(
                f"{run.size} consecutive missing hours in {var} starting "
                f"{days[d].date()} hour {h + 1}; cannot repair")
        i = int(run[0])
        left = series[i - 1] if i > 0 else np.nan
        right = series[i + 1] if i < n - 1 else np.nan
        if np.isfinite(left) and np.isfinite(right):
            series[i] = 0.5 * (left + right)
            method = "neighbor_mean"
        elif np.isfinite(left):
            series[i] = left
            method = "neighbor_single"
        elif np.isfinite(right):
            series[i] = right
            method = "neighbor_single"
        else:
            d, h = divmod(i, 24)
            raise DataError(
                f"isolated missing hour with no finite neighbor in {var} at "
                f"{days[d].date()} hour {h + 1}")
        d, h = divmod(i, 24)
        log.append({"date": str(days[d].date()), "hour": h + 1,
                    "variable": var, "method": method})


def load_panel(path, market):
    """Parse, validate, and repair one market CSV into a gap-free panel."""
    variables = variables_for(market)
    cells = _parse_rows(path, variables)

    dates = sorted({day for day, _ in cells})
    days = pd.date_range(dates[0], dates[-1], freq="D")
    pos = {day.date(): i for i, day in enumerate(days)}

    log = []
    values = {var: np.full((len(days), 24), np.nan) for var in variables}
    for (day, hour), rows in sorted(cells.items()):
        if len(rows) > 2:
            raise DataError(f"{len(rows)} rows for {day} hour {hour}; at most 2 allowed")
        i, h = pos[day], hour - 1
        if len(rows) == 2:
            for var in variables:
                pair = np.array([rows[0][var], rows[1][var]])
                finite = pair[np.isfinite(pair)]
                if finite.size:
                    values[var][i, h] = finite.mean()
                    log.append({"date": str(day), "hour": hour,
                                "variable": var, "method": "doubled_mean"})
        else:
            for var in variables:
                values[var][i, h] = rows[0][var]

    for var in variables:
        flat = values[var].reshape(-1)
        _repair_series(flat, days, var, log)
        values[var] = flat.reshape(len(days), 24)

    return TimeSeriesPanel(market=market.upper(), days=days, values=values,
                           repair_log=log)


def save_panel(panel, path):
    """Write a panel back to the CSV schema (round-trippable floats)."""
    variables = variables_for(panel.market)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "hour", *variables])
        for i, day in enumerate(panel.days):
            for h in range(24):
                writer.writerow([day.date(), h + 1,
                                 *(repr(float(panel.values[v][i, h])) for v in variables)])


def write_repair_log(panel, path):
    with open(path, "w") as fh:
        for entry in panel.repair_log:
            fh.write(json.dumps(entry) + "\n")
