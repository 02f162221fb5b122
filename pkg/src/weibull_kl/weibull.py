"""Two-parameter Weibull distribution: density, cdf, quantile, sampling, MLE.

Density functions accept scalars or numpy arrays. Scalars come back as
plain floats, arrays as arrays of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WeibullParams",
    "FitResult",
    "UNBOUNDED",
    "pdf",
    "log_pdf",
    "cdf",
    "quantile",
    "uniform_stream",
    "sample",
    "profile_residual",
    "mle_fit",
]

#: Returned by :func:`pdf` at ``x = 0`` when ``shape < 1``; the density diverges there.
UNBOUNDED = math.inf

MLE_TOL = 1e-10
MLE_MAX_ITER = 200
MLE_BRACKET = (1e-3, 1e3)
_MLE_INIT_CLAMP = (0.05, 50.0)


@dataclass(frozen=True)
class WeibullParams:
    """Shape ``k`` and scale ``l`` of a Weibull distribution."""

    shape: float
    scale: float

    def __post_init__(self):
        for name in ("shape", "scale"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise TypeError(f"{name} must be a real number, got {value!r}")
            value = float(value)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)

    def __iter__(self):
        yield self.shape
        yield self.scale


@dataclass(frozen=True)
class FitResult:
    params: WeibullParams
    log_likelihood: float
    iterations: int
    converged: bool


def _as_array(x, name: str):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def pdf(p: WeibullParams, x):
    """Weibull density ``(k/l) (x/l)**(k-1) exp(-(x/l)**k)`` for ``x >= 0``.

    At ``x = 0`` the density is 0 for ``k > 1``, ``1/l`` for ``k = 1`` and
    :data:`UNBOUNDED` for ``k < 1``.
    """
    k, l = p.shape, p.scale
    x = _as_array(x, "x")
    if np.any(x < 0):
        raise ValueError("pdf is defined for x >= 0 only")
    pos = x > 0
    log_z = np.log(np.where(pos, x, 1.0) / l)
    # exp(k log z) instead of z**k; an overflow to inf correctly sends the density to 0
    with np.errstate(over="ignore"):
        z_k = np.exp(k * log_z)
        dens = (k / l) * np.exp((k - 1.0) * log_z - z_k)
    if k > 1.0:
        at_zero = 0.0
    elif k == 1.0:
        at_zero = 1.0 / l
    else:
        at_zero = UNBOUNDED
    return _out(np.where(pos, dens, at_zero))


def log_pdf(p: WeibullParams, x):
    """``log k - k log l + (k-1) log x - (x/l)**k`` for ``x > 0``."""
    k, l = p.shape, p.scale
    x = _as_array(x, "x")
    if np.any(x <= 0):
        raise ValueError("log_pdf is defined for x > 0 only")
    log_x = np.log(x)
    log_l = math.log(l)
    with np.errstate(over="ignore"):
        z_k = np.exp(k * (log_x - log_l))
    return _out(math.log(k) - k * log_l + (k - 1.0) * log_x - z_k)


def cdf(p: WeibullParams, x):
    k, l = p.shape, p.scale
    x = _as_array(x, "x")
    if np.any(x < 0):
        raise ValueError("cdf is defined for x >= 0 only")
    with np.errstate(divide="ignore", over="ignore"):
        z_k = np.exp(k * np.log(x / l))
    return _out(-np.expm1(-z_k))


def quantile(p: WeibullParams, u):
    """Inverse cdf ``l (-log(1-u))**(1/k)`` for ``0 < u < 1``."""
    u = np.asarray(u, dtype=float)
    if not np.all((u > 0) & (u < 1)):
        raise ValueError("quantile requires 0 < u < 1")
    return _out(p.scale * np.exp(np.log(-np.log1p(-u)) / p.shape))


def uniform_stream(n: int, seed: int) -> np.ndarray:
    """``n`` uniforms strictly inside (0, 1) from a Philox4x64 stream.

    The top 53 bits of each raw 64-bit output ``m`` map to ``(m + 0.5) / 2**53``,
    so neither endpoint is reachable and the result depends only on the raw
    bit stream, which numpy keeps fixed across platforms and releases.
    """
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    raw = np.random.Philox(int(seed)).random_raw(int(n))
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def sample(p: WeibullParams, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` variates by inverse-transform sampling; deterministic in ``seed``."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return quantile(p, uniform_stream(n, seed))


def _centered_logs(data) -> np.ndarray:
    x = np.asarray(data, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need at least 2 observations")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("observations must be positive and finite")
    if np.all(x == x[0]):
        raise ValueError("all observations are identical; shape estimate is unbounded")
    return np.log(x)


def _profile_terms(k: float, u: np.ndarray):
    """Residual and its derivative for centered log data ``u``.

    With weights ``w_i`` proportional to ``exp(k u_i)``, the residual is
    ``E_w[u] - 1/k`` and its derivative ``Var_w[u] + 1/k**2``; it is strictly
    increasing in ``k``.
    """
    w = np.exp(k * (u - u.max()))
    w /= w.sum()
    mean_w = float(np.dot(w, u))
    var_w = float(np.dot(w, (u - mean_w) ** 2))
    return mean_w - 1.0 / k, var_w + 1.0 / (k * k)


def profile_residual(data, shape: float) -> float:
    """``sum x^k ln x / sum x^k - mean(ln x) - 1/k``; zero at the MLE shape."""
    log_x = _centered_logs(data)
    return _profile_terms(float(shape), log_x - log_x.mean())[0]


def _log_likelihood(log_x: np.ndarray, k: float, log_l: float) -> float:
    n = log_x.size
    z_k = np.exp(k * (log_x - log_l))
    return float(n * (math.log(k) - k * log_l) + (k - 1.0) * log_x.sum() - z_k.sum())


def mle_fit(data) -> FitResult:
    """Maximum-likelihood shape and scale for complete (uncensored) data.

    The shape solves the profile equation by Newton steps kept inside a
    shrinking sign-change bracket, with bisection whenever a step leaves it.
    Failure to converge is reported through ``converged=False``.
    """
    log_x = _centered_logs(data)
    center = float(log_x.mean())
    u = log_x - center

    lo, hi = MLE_BRACKET
    r_lo = _profile_terms(lo, u)[0]
    r_hi = _profile_terms(hi, u)[0]
    sd = float(u.std())
    k = min(max(1.2 / sd, _MLE_INIT_CLAMP[0]), _MLE_INIT_CLAMP[1]) if sd > 0 else hi
    converged = False
    it = 0
    if r_lo < 0.0 < r_hi:
        for it in range(1, MLE_MAX_ITER + 1):
            r, dr = _profile_terms(k, u)
            if abs(r) <= MLE_TOL:
                converged = True
                break
            if r > 0:
                hi = k
            else:
                lo = k
            step = k - r / dr
            k = step if lo < step < hi else 0.5 * (lo + hi)
    else:
        k = lo if r_lo >= 0 else hi

    # log l = (1/k) log mean(x^k), evaluated around the largest observation
    u_max = float(u.max())
    log_l = center + u_max + math.log(float(np.mean(np.exp(k * (u - u_max))))) / k
    params = WeibullParams(k, math.exp(log_l))
    return FitResult(params, _log_likelihood(log_x, k, log_l), it, converged)
