"""Numba kernels: scalar penalty values, scalar proximal maps, and the
cyclic coordinate-descent loop.

Everything here works on a single (family code, lambda, shape) triple plus a
per-coordinate weight vector (used by the adaptive-LASSO family, ones
elsewhere).  The objective solved coordinate-wise is

    a * (b - z)**2 + g(b)

with a > 0, matching an unhalved residual-sum-of-squares data term.  Family
codes are fixed integers so the kernels stay monomorphic; the public string
names live in ``penalties.py``.
"""

import numpy as np
from numba import njit

OLS = 0
LASSO = 1
RIDGE = 2
EN = 3
ALASSO = 4
LQ = 5
CLASSO = 6
CPF = 7
MCPLUS = 8
SCAD = 9
FLASH = 10

_NEWTON_TOL = 1e-12
_NEWTON_MAX = 200


@njit(cache=True, nogil=True)
def penalty_scalar(code, b, lam, shape, w):
    """Penalty g(b) for one coordinate; w is the adaptive-LASSO weight."""
    ab = abs(b)
    if code == OLS:
        return 0.0
    if code == LASSO:
        return lam * ab
    if code == RIDGE:
        return lam * b * b
    if code == EN:
        return lam * (shape * ab + (1.0 - shape) * b * b)
    if code == ALASSO:
        return lam * (ab / w) ** shape
    if code == LQ:
        return lam * ab ** shape
    if code == CLASSO:
        return lam * min(ab, shape)
    if code == CPF:
        return lam * shape * ab / (shape + ab)
    if code == MCPLUS:
        if ab <= shape * lam:
            return lam * ab - b * b / (2.0 * shape)
        return lam * lam * shape / 2.0
    if code == SCAD:
        if ab <= lam:
            return lam * ab
        if ab <= shape * lam:
            return (-ab * ab + 2.0 * shape * lam * ab - lam * lam) / (2.0 * (shape - 1.0))
        return lam * lam * (1.0 + shape) / 2.0
    if code == FLASH:
        return lam * (1.0 - shape) * ab
    return 0.0


@njit(cache=True, nogil=True)
def _soft(z, t):
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


@njit(cache=True, nogil=True)
def _lq_root(v, a, lam, q):
    """Root of h(b) = 2a(b - v) + lam*q*b^(q-1) on (0, v), for v > 0, q in (1, 2).

    h(0+) = -2av < 0, h(v) > 0 and h is strictly increasing, so the root is
    unique.  Newton from the right with a bisection bracket as safeguard.
    """
    lo = 0.0
    hi = v
    b = v
    for _ in range(_NEWTON_MAX):
        h = 2.0 * a * (b - v) + lam * q * b ** (q - 1.0)
        if h > 0.0:
            hi = b
        else:
            lo = b
        hp = 2.0 * a + lam * q * (q - 1.0) * b ** (q - 2.0)
        step = h / hp
        bn = b - step
        if bn <= lo or bn >= hi:
            bn = 0.5 * (lo + hi)
        if abs(bn - b) < _NEWTON_TOL * (1.0 + v):
            return bn
        b = bn
    return b


@njit(cache=True, nogil=True)
def _cpf_root(v, a, lam, k, lo, hi):
    """Root of h(b) = 2a(b - v) + lam*k^2/(k+b)^2 on the bracket [lo, hi]."""
    b = 0.5 * (lo + hi)
    for _ in range(_NEWTON_MAX):
        h = 2.0 * a * (b - v) + lam * k * k / ((k + b) * (k + b))
        if h > 0.0:
            hi = b
        else:
            lo = b
        hp = 2.0 * a - 2.0 * lam * k * k / ((k + b) ** 3)
        bn = b
        if hp > 0.0:
            bn = b - h / hp
        if bn <= lo or bn >= hi:
            bn = 0.5 * (lo + hi)
        if abs(bn - b) < _NEWTON_TOL * (1.0 + v):
            return bn
        b = bn
    return b


@njit(cache=True, nogil=True)
def _pick(code, cands, ncand, v, a, lam, shape, w):
    """Smallest-|b| global minimizer among nonnegative candidates."""
    best = 0.0
    fbest = a * v * v  # objective at b = 0 (g(0) = 0 for every family)
    for i in range(ncand):
        b = cands[i]
        if b <= 0.0:
            continue
        f = a * (b - v) * (b - v) + penalty_scalar(code, b, lam, shape, w)
        if f < fbest or (f == fbest and b < best):
            best = b
            fbest = f
    return best


@njit(cache=True, nogil=True)
def prox_scalar(code, z, a, lam, shape, w):
    """Global minimizer of a*(b - z)^2 + g(b); ties resolve to smaller |b|."""
    if code == OLS or lam == 0.0:
        return z
    if z == 0.0:
        return 0.0
    s = 1.0 if z > 0.0 else -1.0
    v = abs(z)

    if code == LASSO:
        return s * _soft(v, lam / (2.0 * a))
    if code == FLASH:
        return s * _soft(v, lam * (1.0 - shape) / (2.0 * a))
    if code == RIDGE:
        return a * z / (a + lam)
    if code == EN:
        num = _soft(a * v, lam * shape / 2.0)
        return s * num / (a + lam * (1.0 - shape))

    if code == ALASSO:
        lam_eff = lam / w ** shape
        if shape == 1.0:
            return s * _soft(v, lam_eff / (2.0 * a))
        if shape == 2.0:
            return a * z / (a + lam_eff)
        return s * _lq_root(v, a, lam_eff, shape)

    if code == LQ:
        if shape == 1.0:
            return s * _soft(v, lam / (2.0 * a))
        if shape == 2.0:
            return a * z / (a + lam)
        return s * _lq_root(v, a, lam, shape)

    cands = np.empty(6)

    if code == CLASSO:
        alpha = shape
        b1 = v - lam / (2.0 * a)
        if b1 < 0.0:
            b1 = 0.0
        elif b1 > alpha:
            b1 = alpha
        cands[0] = b1
        cands[1] = alpha
        cands[2] = v if v > alpha else alpha
        return s * _pick(code, cands, 3, v, a, lam, shape, w)

    if code == CPF:
        k = shape
        h0 = -2.0 * a * v + lam
        if h0 < 0.0:
            # objective decreasing at 0+: unique stationary point is global
            bh = (lam * k * k / a) ** (1.0 / 3.0) - k
            lo = bh if bh > 0.0 else 0.0
            return s * _cpf_root(v, a, lam, k, lo, v)
        bh = (lam * k * k / a) ** (1.0 / 3.0) - k
        if bh <= 0.0:
            return 0.0
        hbh = 2.0 * a * (bh - v) + lam * k * k / ((k + bh) * (k + bh))
        if hbh >= 0.0:
            return 0.0
        b2 = _cpf_root(v, a, lam, k, bh, v)
        cands[0] = b2
        return s * _pick(code, cands, 1, v, a, lam, shape, w)

    if code == MCPLUS:
        gam = shape
        t = gam * lam
        c = 2.0 * a - 1.0 / gam
        n = 0
        if c > 0.0:
            bi = (2.0 * a * v - lam) / c
            if bi < 0.0:
                bi = 0.0
            elif bi > t:
                bi = t
            cands[n] = bi
            n += 1
        cands[n] = t
        n += 1
        cands[n] = v if v > t else t
        n += 1
        return s * _pick(code, cands, n, v, a, lam, shape, w)

    if code == SCAD:
        alpha = shape
        t1 = lam
        t2 = alpha * lam
        n = 0
        b1 = v - lam / (2.0 * a)
        if b1 < 0.0:
            b1 = 0.0
        elif b1 > t1:
            b1 = t1
        cands[n] = b1
        n += 1
        cands[n] = t1
        n += 1
        c = 2.0 * a - 1.0 / (alpha - 1.0)
        if c > 0.0:
            b2 = (2.0 * a * v - alpha * lam / (alpha - 1.0)) / c
            if b2 < t1:
                b2 = t1
            elif b2 > t2:
                b2 = t2
            cands[n] = b2
            n += 1
        cands[n] = t2
        n += 1
        cands[n] = v if v > t2 else t2
        n += 1
        return s * _pick(code, cands, n, v, a, lam, shape, w)

    return z


@njit(cache=True, nogil=True)
def _cd_sweep(X, r, beta, colnorm2, code, lam, shape, weights, active_only, active):
    T, P = X.shape
    dmax = 0.0
    for j in range(P):
        if active_only and not active[j]:
            continue
        if colnorm2[j] <= 0.0:
            continue
        bj = beta[j]
        rho = 0.0
        for t in range(T):
            rho += X[t, j] * r[t]
        a = colnorm2[j]
        z = rho / a + bj
        bn = prox_scalar(code, z, a, lam, shape, weights[j])
        d = bn - bj
        if d != 0.0:
            for t in range(T):
                r[t] -= d * X[t, j]
            beta[j] = bn
            active[j] = bn != 0.0
            ad = abs(d)
            if ad > dmax:
                dmax = ad
    return dmax


@njit(cache=True, nogil=True)
def _objective(r, beta, code, lam, shape, weights):
    obj = 0.0
    for t in range(r.shape[0]):
        obj += r[t] * r[t]
    for j in range(beta.shape[0]):
        obj += penalty_scalar(code, beta[j], lam, shape, weights[j])
    return obj


@njit(cache=True, nogil=True)
def cd_solve(X, y, beta, code, lam, shape, weights, tol, max_sweeps):
    """Cyclic coordinate descent with active-set inner loops.

    beta is updated in place (warm start).  Returns
    (sweeps, converged, monotone_violations): the objective is checked after
    every sweep and may never increase beyond rounding slack because each
    coordinate update is an exact 1-D minimization.  Convergence is a full
    sweep whose largest coefficient change is below tol.
    """
    T, P = X.shape
    colnorm2 = np.empty(P)
    for j in range(P):
        s = 0.0
        for t in range(T):
            s += X[t, j] * X[t, j]
        colnorm2[j] = s
        if s <= 0.0:
            beta[j] = 0.0

    r = y - X @ beta
    active = np.empty(P, dtype=np.bool_)
    for j in range(P):
        active[j] = beta[j] != 0.0

    violations = 0
    prev_obj = _objective(r, beta, code, lam, shape, weights)
    sweeps = 0
    since_refresh = 0
    while sweeps < max_sweeps:
        sweeps += 1
        since_refresh += 1
        if since_refresh >= 100:
            # counter accumulated drift in the incremental residual
            r = y - X @ beta
            since_refresh = 0
        d = _cd_sweep(X, r, beta, colnorm2, code, lam, shape, weights, False, active)
        obj = _objective(r, beta, code, lam, shape, weights)
        if obj > prev_obj + 1e-6 * (1.0 + abs(prev_obj)):
            violations += 1
        prev_obj = obj
        if d < tol:
            return sweeps, True, violations
        while sweeps < max_sweeps:
            sweeps += 1
            since_refresh += 1
            d = _cd_sweep(X, r, beta, colnorm2, code, lam, shape, weights, True, active)
            obj = _objective(r, beta, code, lam, shape, weights)
            if obj > prev_obj + 1e-6 * (1.0 + abs(prev_obj)):
                violations += 1
            prev_obj = obj
            if d < tol:
                break
    return sweeps, False, violations
