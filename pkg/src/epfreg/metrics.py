"""Forecast scoring in price space: RMSE and rRMSE versus an OLS baseline.

    RMSE  = sqrt( (1 / 24D) * sum_d sum_h (P_dh - Phat_dh)^2 )
    rRMSE = (RMSE_reg - RMSE_ols) / RMSE_ols * 100%
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, NumericError


@dataclass
class ScoreReport:
    rmse: float
    n_days: int
    n_hours: int = 24
    first_day: str = ""
    last_day: str = ""
    rrmse_vs_baseline: float | None = None

    def to_dict(self):
        return {
            "rmse": self.rmse,
            "n_days": self.n_days,
            "n_hours": self.n_hours,
            "first_day": self.first_day,
            "last_day": self.last_day,
            "rrmse_vs_baseline": self.rrmse_vs_baseline,
        }


def _check_coverage(records):
    by_day = {}
    for rec in records:
        by_day.setdefault(rec.day, set()).add(rec.hour)
    for day, hours in by_day.items():
        if hours != set(range(1, 25)):
            raise CoverageError(f"day {day} covers {len(hours)} hours, expected 24")
    return sorted(by_day)


def rmse(records):
    if not records:
        raise CoverageError("no forecast records")
    _check_coverage(records)
    err = np.array([rec.actual_price - rec.forecast_price for rec in records])
    return float(np.sqrt(np.mean(err ** 2)))


def score(records):
    days = _check_coverage(records)
    if not days:
        raise CoverageError("no forecast records")
    return ScoreReport(rmse=rmse(records), n_days=len(days),
                       first_day=str(days[0]), last_day=str(days[-1]))


def rrmse(report, baseline):
    """Percentage RMSE change versus the baseline (negative = better)."""
    if (report.n_days, report.first_day, report.last_day) != \
            (baseline.n_days, baseline.first_day, baseline.last_day):
        raise CoverageError("reports cover different (day, hour) sets")
    if baseline.rmse == 0.0:
        raise NumericError("baseline RMSE is zero")
    return (report.rmse - baseline.rmse) / baseline.rmse * 100.0


def write_report(report, path):
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
