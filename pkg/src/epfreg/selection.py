"""Tuning-parameter selection: 7-fold cross-validation or BIC.

Folds are contiguous blocks of rows (days).  Modulo-style folds would alias
the weekday dummies — every training set would lose one dummy column
entirely — and contiguous blocks also respect the serial dependence of the
data.  The CV score of a candidate is the pooled mean squared prediction
error over all held-out rows.  Ties resolve to the largest lambda, then the
smallest shape value.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateFitError, FoldError
from .features import DesignMatrix
from .penalties import SHAPE_GRIDS, PenaltySpec
from .solver import (
    adaptive_weights,
    default_lambda_grid,
    fit_flash,
    fit_ols,
    fit_path,
    fit_penalized,
)


@dataclass
class SelectionPlan:
    method: str = "cv"              # 'cv' | 'bic'
    folds: int = 7
    shape_mode: str = "fixed"       # 'fixed' | 'cv' (joint CV over the grid)
    shape: float | None = None
    lambdas: np.ndarray | None = None
    n_lambda: int = 50
    min_ratio: float = 1e-4
    lambda_top: float | None = None

    def __post_init__(self):
        if self.method not in ("cv", "bic"):
            raise ConfigError(f"unknown selection method {self.method!r}")
        if self.folds < 2:
            raise ConfigError("need at least 2 folds")
        if self.shape_mode not in ("fixed", "cv"):
            raise ConfigError(f"unknown shape mode {self.shape_mode!r}")
        if self.shape_mode == "cv" and self.method == "bic":
            raise ConfigError("joint shape selection is unavailable for BIC")


@dataclass
class Candidate:
    shape: float | None
    lam: float
    score: float


@dataclass
class SelectionResult:
    spec: PenaltySpec
    fit: object
    trace: list = field(repr=False)
    fallback: bool = False


def _shape_list(family, plan):
    grid = SHAPE_GRIDS.get(family)
    if grid is None:
        if plan.shape is not None:
            raise ConfigError(f"{family} takes no shape parameter")
        return [None]
    if plan.shape_mode == "cv":
        return list(grid)
    if plan.shape is None:
        raise ConfigError(f"{family} needs a fixed shape or shape_mode='cv'")
    return [float(plan.shape)]


def _grid_for(dm, family, shape, plan, weights):
    if plan.lambdas is not None:
        return np.asarray(plan.lambdas, dtype=float)
    return default_lambda_grid(dm, family, shape, weights=weights,
                               n=plan.n_lambda, min_ratio=plan.min_ratio,
                               top=plan.lambda_top)


def make_folds(T, folds):
    """Contiguous near-equal blocks covering 0..T-1 exactly once."""
    if T < folds * 10:
        raise FoldError(f"{T} rows cannot support {folds} nondegenerate folds")
    return np.array_split(np.arange(T), folds)


def _check_fold_dummies(dm, blocks):
    if dm.dummy_mask is None or not dm.dummy_mask.any():
        return
    D = dm.X[:, dm.dummy_mask]
    for block in blocks:
        train = np.delete(np.arange(dm.X.shape[0]), block)
        if np.any(D[train].sum(axis=0) == 0):
            raise FoldError("a training set lost an entire weekday dummy")


def _subproblem(dm, rows):
    return DesignMatrix(hour=dm.hour, y=dm.y[rows], X=dm.X[rows],
                        labels=dm.labels, day_index=dm.day_index[rows],
                        dummy_mask=dm.dummy_mask)


def _path_fits(dm, family, shape, grid, weights, standardize):
    if family == "flash":
        return fit_flash(dm, shape, grid, standardize=standardize).fits
    return fit_path(dm, family, shape, grid, weights=weights,
                    standardize=standardize).fits


def select_cv(dm, family, plan, standardize=True):
    """Pick (lambda[, shape]) by blocked k-fold CV and refit on all data."""
    if plan.method != "cv":
        raise ConfigError("select_cv requires a CV plan")
    T = dm.X.shape[0]
    blocks = make_folds(T, plan.folds)
    _check_fold_dummies(dm, blocks)
    shapes = _shape_list(family, plan)
    full_weights = adaptive_weights(dm, standardize) if family == "alasso" else None

    all_rows = np.arange(T)
    trace = []
    for shape in sorted(shapes, key=lambda s: (s is None, s)):
        grid = _grid_for(dm, family, shape, plan, full_weights)
        sq = np.zeros(grid.size)
        for block in blocks:
            train = np.delete(all_rows, block)
            sub = _subproblem(dm, train)
            w = adaptive_weights(sub, standardize) if family == "alasso" else None
            fits = _path_fits(sub, family, shape, grid, w, standardize)
            Xh, yh = dm.X[block], dm.y[block]
            for i, fit in enumerate(fits):
                err = yh - Xh @ fit.beta
                sq[i] += float(err @ err)
        for i, lam in enumerate(grid):
            trace.append(Candidate(shape=shape, lam=float(lam), score=sq[i] / T))

    best = min(trace, key=lambda c: (c.score, -c.lam, np.inf if c.shape is None else c.shape))
    grid = _grid_for(dm, family, best.shape, plan, full_weights)
    fits = _path_fits(dm, family, best.shape, grid, full_weights, standardize)
    pos = int(np.argmin(np.abs(grid - best.lam)))
    spec = PenaltySpec(family, best.lam, best.shape,
                       weights=full_weights if family == "alasso" else None)
    return SelectionResult(spec=spec, fit=fits[pos], trace=trace)


def bic_score(T, rss, df):
    if rss == 0.0:
        raise DegenerateFitError("zero RSS: BIC is undefined")
    return T * np.log(rss / T) + df * np.log(T)


def select_bic(dm, family, plan, standardize=True):
    """Pick lambda by BIC = T ln(RSS/T) + df ln(T) over the grid."""
    if plan.method != "bic":
        raise ConfigError("select_bic requires a BIC plan")
    if plan.shape_mode != "fixed":
        raise ConfigError("joint shape selection is unavailable for BIC")
    shape = _shape_list(family, plan)[0]
    weights = adaptive_weights(dm, standardize) if family == "alasso" else None
    grid = _grid_for(dm, family, shape, plan, weights)
    fits = _path_fits(dm, family, shape, grid, weights, standardize)
    T = dm.X.shape[0]

    trace = []
    best_i, best_score = None, np.inf
    fallback = False
    for i, fit in enumerate(fits):
        try:
            score = bic_score(T, fit.rss, fit.df)
        except DegenerateFitError:
            fallback = True
            continue
        trace.append(Candidate(shape=shape, lam=float(grid[i]), score=float(score)))
        if score < best_score:
            best_i, best_score = i, score
    if best_i is None:
        # every candidate interpolated: fall back to the smallest lambda
        best_i = len(fits) - 1
        fallback = True
    spec = PenaltySpec(family, float(grid[best_i]), shape,
                       weights=weights if family == "alasso" else None)
    return SelectionResult(spec=spec, fit=fits[best_i], trace=trace,
                           fallback=fallback)


def select(dm, family, plan, standardize=True):
    """Family- and method-dispatching entry point used by the backtest."""
    if family == "ols":
        return SelectionResult(spec=PenaltySpec("ols"), fit=fit_ols(dm), trace=[])
    if plan.method == "cv":
        return select_cv(dm, family, plan, standardize)
    return select_bic(dm, family, plan, standardize)


def refit(dm, family, lam, shape, standardize=True):
    """Fit at a previously chosen (lambda, shape) on fresh data."""
    if family == "ols":
        return PenaltySpec("ols"), fit_ols(dm)
    weights = adaptive_weights(dm, standardize) if family == "alasso" else None
    spec = PenaltySpec(family, lam, shape, weights=weights)
    if family == "flash":
        path = fit_flash(dm, shape, np.array([lam]), standardize=standardize)
        return spec, path.fits[0]
    return spec, fit_penalized(dm, spec, standardize=standardize)
