"""Variance-stabilizing transform and its inverse.

Each series is mapped through its empirical CDF (plotting positions
rank/(n+1), linearly interpolated between order statistics) and then the
standard-normal quantile, giving approximately standard-normal marginals.
The inverse maps a model-space value z back to an empirical quantile at
probability N(z), clamped to the observed sample range.
"""

import numpy as np
from scipy.stats import norm

from .errors import DegenerateSampleError


class EcdfModel:
    """Empirical CDF of a calibration sample; immutable after fit."""

    __slots__ = ("sorted_sample", "n", "_positions")

    def __init__(self, sorted_sample):
        self.sorted_sample = sorted_sample
        self.n = sorted_sample.shape[0]
        self._positions = np.arange(1, self.n + 1) / (self.n + 1.0)

    def position(self, x):
        """Plotting position in [1/(n+1), n/(n+1)], interpolated."""
        return np.interp(x, self.sorted_sample, self._positions)

    def quantile(self, p):
        """Empirical quantile, clamped to [min, max] of the sample."""
        return np.interp(p, self._positions, self.sorted_sample)


def fit_ecdf(sample):
    sample = np.asarray(sample, dtype=float).ravel()
    sample = sample[np.isfinite(sample)]
    if sample.size < 2:
        raise DegenerateSampleError("need at least 2 finite values")
    if sample.min() == sample.max():
        raise DegenerateSampleError("sample is constant")
    return EcdfModel(np.sort(sample))


def npit_forward(model, x):
    """Standard-normal score of x under the fitted ECDF; finite everywhere."""
    return norm.ppf(model.position(x))


def npit_inverse(model, z):
    """Empirical quantile at probability N(z)."""
    return model.quantile(norm.cdf(z))


def fit_panel_ecdfs(panel, day_slice, per_hour=False):
    """One ECDF per variable over the given day positions.

    Pooled across all 24 hours by default; with per_hour=True a separate
    model per (variable, hour) is fitted instead (keyed (var, hour)).
    """
    models = {}
    for var, mat in panel.values.items():
        window = mat[day_slice]
        if per_hour:
            for h in range(24):
                models[(var, h + 1)] = fit_ecdf(window[:, h])
        else:
            models[var] = fit_ecdf(window)
    return models


def transform_matrix(models, var, mat, per_hour=False):
    """N-PIT a (days x 24) matrix with the fitted models."""
    if per_hour:
        out = np.empty_like(mat)
        for h in range(24):
            out[:, h] = npit_forward(models[(var, h + 1)], mat[:, h])
        return out
    return npit_forward(models[var], mat)
