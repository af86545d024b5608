"""The ten penalty families: values, proximal maps, and tuning grids.

Families are addressed by lowercase string name.  Each family has a tuning
parameter lambda >= 0 and, for eight of the ten, one extra shape parameter:

    alasso  q      exponent of the weighted l^q term, default grid {1, 1.5, 2}
    classo  alpha  clipping level, grid {0.5, 1, 1.5}
    cpf     k      curvature of the concave potential, grid {5, 15, 25}
    en      alpha  l1/l2 mixing in [0, 1], grid {0.25, 0.5, 0.75}
    flash   gamma  shrinkage discount in [0, 1], grid {0.25, 0.5, 0.75}
    lq      q      norm order in (1, 2), grid {1.25, 1.5, 1.75}
    mcplus  gamma  concavity span >= 1, grid {1, 3, 5}
    scad    alpha  outer knot multiplier > 2, grid {10, 20, 30}

'lasso' and 'ridge' take lambda only; 'ols' takes neither.  Lambda is capped
at 2.0 for lq and 5.0 for ridge.  The adaptive LASSO additionally needs a
vector of positive reference weights |beta*| (floored at WEIGHT_FLOOR).
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from .errors import ConfigError

FAMILIES = (
    "ols", "alasso", "classo", "cpf", "en", "flash",
    "lasso", "lq", "mcplus", "ridge", "scad",
)

_CODES = {
    "ols": _k.OLS, "lasso": _k.LASSO, "ridge": _k.RIDGE, "en": _k.EN,
    "alasso": _k.ALASSO, "lq": _k.LQ, "classo": _k.CLASSO, "cpf": _k.CPF,
    "mcplus": _k.MCPLUS, "scad": _k.SCAD, "flash": _k.FLASH,
}

SHAPE_GRIDS = {
    "alasso": (1.0, 1.5, 2.0),
    "classo": (0.5, 1.0, 1.5),
    "cpf": (5.0, 15.0, 25.0),
    "en": (0.25, 0.5, 0.75),
    "flash": (0.25, 0.5, 0.75),
    "lq": (1.25, 1.5, 1.75),
    "mcplus": (1.0, 3.0, 5.0),
    "scad": (10.0, 20.0, 30.0),
}

LAMBDA_CAPS = {"lq": 2.0, "ridge": 5.0}

# Families whose prox produces exact zeros (soft-threshold-like at the origin).
SELECTING = frozenset({"lasso", "en", "classo", "cpf", "mcplus", "scad", "flash"})

CONVEX = frozenset({"ols", "lasso", "ridge", "en", "lq", "alasso"})

WEIGHT_FLOOR = 1e-8


def _check_shape(family, shape):
    if family in ("ols", "lasso", "ridge"):
        if shape is not None:
            raise ConfigError(f"{family} takes no shape parameter")
        return None
    if shape is None:
        raise ConfigError(f"{family} requires a shape parameter")
    shape = float(shape)
    if family == "en" and not 0.0 <= shape <= 1.0:
        raise ConfigError("en alpha must lie in [0, 1]")
    if family == "flash" and not 0.0 <= shape <= 1.0:
        raise ConfigError("flash gamma must lie in [0, 1]")
    if family == "lq" and not 1.0 < shape <= 2.0:
        raise ConfigError("lq exponent must lie in (1, 2]")
    if family == "alasso" and shape < 1.0:
        raise ConfigError("alasso exponent must be >= 1")
    if family == "mcplus" and shape < 1.0:
        raise ConfigError("mcplus gamma must be >= 1")
    if family == "scad" and shape <= 2.0:
        raise ConfigError("scad alpha must exceed 2")
    if family in ("classo", "cpf") and shape <= 0.0:
        raise ConfigError(f"{family} shape must be positive")
    return shape


@dataclass(frozen=True)
class PenaltySpec:
    """One fully-specified penalty: family, lambda, shape, adaptive weights."""

    family: str
    lam: float = 0.0
    shape: float | None = None
    weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown penalty family {self.family!r}")
        if self.lam < 0.0:
            raise ConfigError("lambda must be nonnegative")
        cap = LAMBDA_CAPS.get(self.family)
        if cap is not None and self.lam > cap:
            raise ConfigError(f"{self.family} lambda {self.lam} exceeds cap {cap}")
        object.__setattr__(self, "shape", _check_shape(self.family, self.shape))
        if self.family == "alasso":
            if self.weights is None:
                raise ConfigError("alasso requires adaptive weights")
            w = np.maximum(np.abs(np.asarray(self.weights, dtype=float)), WEIGHT_FLOOR)
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ConfigError("adaptive weights are only valid for alasso")

    @property
    def code(self):
        return _CODES[self.family]

    def weight(self, coord):
        return 1.0 if self.weights is None else float(self.weights[coord])

    def weight_vector(self, p):
        if self.weights is not None:
            if len(self.weights) != p:
                raise ConfigError("adaptive weight length does not match design")
            return np.asarray(self.weights, dtype=float)
        return np.ones(p)


def penalty_value(spec, beta, coord=0):
    """Penalty contribution g(beta) of a single coefficient."""
    shape = 0.0 if spec.shape is None else spec.shape
    return float(_k.penalty_scalar(spec.code, float(beta), spec.lam, shape, spec.weight(coord)))


def penalty_total(spec, beta):
    """Sum of g over a coefficient vector."""
    beta = np.asarray(beta, dtype=float)
    w = spec.weight_vector(beta.shape[0])
    shape = 0.0 if spec.shape is None else spec.shape
    total = 0.0
    for j in range(beta.shape[0]):
        total += _k.penalty_scalar(spec.code, beta[j], spec.lam, shape, w[j])
    return float(total)


def scalar_prox(spec, z, a, coord=0):
    """argmin_b a*(b - z)^2 + g(b).  Ties resolve toward smaller |b|."""
    if a <= 0.0:
        raise ValueError("curvature a must be positive")
    shape = 0.0 if spec.shape is None else spec.shape
    return float(_k.prox_scalar(spec.code, float(z), float(a), spec.lam, shape, spec.weight(coord)))


def penalty_gradient(spec, beta):
    """g'(beta) away from zero for the convex families (KKT checks)."""
    beta = np.asarray(beta, dtype=float)
    lam, shape = spec.lam, spec.shape
    s = np.sign(beta)
    ab = np.abs(beta)
    if spec.family == "ols":
        return np.zeros_like(beta)
    if spec.family == "lasso":
        return lam * s
    if spec.family == "ridge":
        return 2.0 * lam * beta
    if spec.family == "en":
        return lam * shape * s + 2.0 * lam * (1.0 - shape) * beta
    if spec.family == "lq":
        return lam * shape * ab ** (shape - 1.0) * s
    if spec.family == "alasso":
        w = spec.weight_vector(beta.shape[0])
        lam_eff = lam / w ** shape
        return lam_eff * shape * ab ** (shape - 1.0) * s
    raise ValueError(f"no subgradient expression for nonconvex family {spec.family}")


def zero_threshold(spec):
    """|gradient| level below which a zero coefficient satisfies the KKT
    condition, for families with a kink at the origin."""
    lam, shape = spec.lam, spec.shape
    if spec.family in ("lasso", "classo", "cpf", "mcplus", "scad"):
        return lam
    if spec.family == "en":
        return lam * shape
    if spec.family == "flash":
        return lam * (1.0 - shape)
    if spec.family == "alasso" and shape == 1.0:
        return lam  # per-coordinate: lam / w_j, handled by caller
    return 0.0


def penalty_curve(family, lam=1.0, shape=None, beta_max=3.0, points=601):
    """Sample (beta, g(beta)) for one family, for plotting or CSV export."""
    if family == "alasso":
        spec = PenaltySpec(family, lam, shape, weights=np.array([1.0]))
    else:
        spec = PenaltySpec(family, lam, shape)
    betas = np.linspace(-beta_max, beta_max, points)
    values = np.array([penalty_value(spec, b) for b in betas])
    return betas, values


def default_shape(family):
    grid = SHAPE_GRIDS.get(family)
    return None if grid is None else grid[len(grid) // 2]
