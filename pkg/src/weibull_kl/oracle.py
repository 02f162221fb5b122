"""Numerical reference values for the Weibull KL divergence.

Nothing here calls the closed form. The quadrature integrates the density
log-ratio directly, after substituting ``y = (x/l1)**k1`` so the weight
becomes ``exp(-y)``; the Monte-Carlo estimator averages the log-ratio over
draws from the first distribution.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .weibull import WeibullParams, log_pdf, sample

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "EstimatorResult",
    "gauss_kronrod_21",
    "integrate",
    "integrate_exp_weighted",
    "kl_quadrature",
    "kl_monte_carlo",
    "euler_mascheroni_check",
    "exp_moment",
]

# QUADPACK dqk21 abscissae (non-negative half) and weights.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
# 10-point Gauss weights live on the odd Kronrod nodes 1, 3, ..., 9.
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(21)
_GAUSS_W[[1, 3, 5, 7, 9]] = _WG
_GAUSS_W[[19, 17, 15, 13, 11]] = _WG
_EPS = np.finfo(float).eps


class QuadratureError(ArithmeticError):
    """Adaptive integration ran out of subdivisions before reaching tolerance."""

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be a positive integer, got {self.max_subdivisions!r}")


@dataclass(frozen=True)
class EstimatorResult:
    estimate: float
    std_error: float
    n: int


def gauss_kronrod_21(f: Callable[[np.ndarray], np.ndarray], a: float, b: float):
    """One 21-point Kronrod panel on ``[a, b]``: ``(integral, error, integral of |f|)``.

    ``f`` is called once with all 21 interior nodes; endpoints are never evaluated.
    The error estimate follows QUADPACK's dqk21.
    """
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    fx = np.asarray(f(center + half * _NODES), dtype=float)
    result_k = float(np.dot(_KRONROD_W, fx)) * half
    result_g = float(np.dot(_GAUSS_W, fx)) * half
    res_abs = float(np.dot(_KRONROD_W, np.abs(fx))) * abs(half)
    mean = result_k / (2.0 * half) if half else 0.0
    res_asc = float(np.dot(_KRONROD_W, np.abs(fx - mean))) * abs(half)
    err = abs(result_k - result_g)
    if res_asc != 0.0 and err != 0.0:
        err = res_asc * min(1.0, (200.0 * err / res_asc) ** 1.5)
    if res_abs > np.finfo(float).tiny / (50.0 * _EPS):
        err = max(50.0 * _EPS * res_abs, err)
    return result_k, err, res_abs


def integrate(f, a: float, b: float, rel_tol: float = 1e-10, max_subdivisions: int = 2000,
              abs_tol: float = 0.0):
    """Globally adaptive Gauss-Kronrod integration of ``f`` over finite ``[a, b]``.

    Bisects the panel with the largest error until the summed error estimate
    drops below ``max(rel_tol * |I|, abs_tol, 50 eps * integral of |f|)``. Returns
    ``(value, error_estimate)``; raises :class:`QuadratureError` when the
    subdivision budget runs out. Panel sums are accumulated with ``math.fsum``
    so the result does not depend on the order panels were refined in.
    """
    value, err, res_abs = gauss_kronrod_21(f, a, b)
    # max-heap on error: entries are (-err, a, b, value, res_abs)
    heap = [(-err, a, b, value, res_abs)]
    n_panels = 1
    while True:
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
        total_abs = math.fsum(item[4] for item in heap)
        if total_err <= max(rel_tol * abs(total), abs_tol, 50.0 * _EPS * total_abs):
            return total, total_err
        if n_panels >= max_subdivisions:
            raise QuadratureError(
                f"tolerance {rel_tol:g} not reached in {max_subdivisions} subdivisions",
                total, total_err,
            )
        _, lo, hi, _, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureError("panel width reached machine resolution", total, total_err)
        for u, v in ((lo, mid), (mid, hi)):
            val, e, ra = gauss_kronrod_21(f, u, v)
            heapq.heappush(heap, (-e, u, v, val, ra))
        n_panels += 1


def _tail_bound(cutoff: float, coefs) -> float:
    """Bound on ``int_Y^inf exp(-y) * (sum_j c_j y**r_j + c_log |log y|) dy``.

    ``coefs`` holds ``(c, r)`` pairs, with ``r = None`` marking the log term.
    Valid once ``Y >= 2 (r + 1)`` for every power: then ``y**r exp(-y)``
    decays at least like ``exp(-y / 2)`` and its tail is at most twice the
    integrand at ``Y``.
    """
    log_y = math.log(cutoff)
    acc = 0.0
    for c, r in coefs:
        if r is None:
            acc += abs(c) * 2.0 * log_y * math.exp(-cutoff)
        else:
            acc += abs(c) * 2.0 * math.exp(r * log_y - cutoff)
    return acc


def integrate_exp_weighted(g, cfg: QuadratureConfig, envelope=(), start_cutoff: float = 50.0,
                           abs_tol: float = 0.0):
    """Integrate ``exp(-y) g(y)`` over ``(0, inf)`` by truncating at a cutoff ``Y``.

    ``envelope`` lists ``(c, r)`` terms with ``|g(y)| <= sum |c| y**r`` for
    ``y >= 1`` (``r = None`` for a ``|c| log y`` term). ``Y`` grows from
    ``start_cutoff`` until the analytic tail bound is below ``rel_tol`` times the
    integral of ``|exp(-y) g(y)|`` over the truncated range, or below
    ``abs_tol`` if that is larger.
    """
    powers = [r for _, r in envelope if r is not None] or [0.0]
    cutoff = max(start_cutoff, 2.0 * (max(powers) + 1.0))

    def weighted(y):
        return np.exp(-y) * g(y)

    value, err = integrate(weighted, 0.0, cutoff, cfg.rel_tol, cfg.max_subdivisions, abs_tol)
    while _tail_bound(cutoff, envelope) > max(0.1 * cfg.rel_tol * abs(value), abs_tol, 1e-300):
        nxt = cutoff * 1.5
        extra, extra_err = integrate(weighted, cutoff, nxt, cfg.rel_tol, cfg.max_subdivisions, abs_tol)
        value += extra
        err += extra_err
        cutoff = nxt
    return value, err


def kl_quadrature(p: WeibullParams, q: WeibullParams, cfg: QuadratureConfig | None = None) -> float:
    """``int f_p log(f_p / f_q) dx`` evaluated numerically in ``y = (x/l1)**k1``.

    With ``x = l1 y**(1/k1)`` the integrand is ``exp(-y) g(y)`` where ``g`` is
    the log density ratio at ``x(y)``, written in terms of ``log y`` so that
    tiny ``y`` never underflows ``x``.
    """
    cfg = cfg or QuadratureConfig()
    k1, l1 = p.shape, p.scale
    k2, l2 = q.shape, q.scale
    log_l1, log_l2 = math.log(l1), math.log(l2)
    log_k1, log_k2 = math.log(k1), math.log(k2)
    ratio = k2 / k1

    def log_densities(y):
        log_y = np.log(y)
        log_x = log_l1 + log_y / k1
        log_f1 = log_k1 - log_l1 + (k1 - 1.0) * (log_x - log_l1) - y
        log_f2 = log_k2 - log_l2 + (k2 - 1.0) * (log_x - log_l2) - np.exp(k2 * (log_x - log_l2))
        return log_f1, log_f2

    def g(y):
        log_f1, log_f2 = log_densities(y)
        return log_f1 - log_f2

    def magnitude(y):
        log_f1, log_f2 = log_densities(y)
        return np.abs(log_f1) + np.abs(log_f2)

    const = abs(log_k1 - log_l1 - log_k2 + log_l2) + abs(k2 - 1.0) * abs(log_l1 - log_l2)
    envelope = (
        (const, 0.0),
        ((abs(k1 - 1.0) + abs(k2 - 1.0)) / k1, None),
        (1.0, 1.0),
        (math.exp(k2 * (log_l1 - log_l2)), ratio),
    )
    start = max(50.0, -math.log(cfg.rel_tol) + 10.0 * (1.0 + ratio))
    # g is a difference of two log densities; when they nearly cancel, rounding
    # in each sets a floor of a few eps times their size on attainable accuracy
    rough = QuadratureConfig(1e-3, cfg.max_subdivisions)
    size, _ = integrate_exp_weighted(magnitude, rough, envelope, start_cutoff=start)
    value, _ = integrate_exp_weighted(g, cfg, envelope, start_cutoff=start,
                                      abs_tol=64.0 * _EPS * size)
    return value


def kl_monte_carlo(p: WeibullParams, q: WeibullParams, n: int, seed: int) -> EstimatorResult:
    """Average of ``log f_p(X) - log f_q(X)`` over ``n`` draws ``X ~ p``.

    The standard error uses the unbiased ``n - 1`` variance.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    x = sample(p, n, seed)
    diff = log_pdf(p, x) - log_pdf(q, x)
    estimate = float(np.mean(diff))
    std_error = float(np.std(diff, ddof=1)) / math.sqrt(n)
    return EstimatorResult(estimate, std_error, int(n))


def euler_mascheroni_check(cfg: QuadratureConfig | None = None) -> float:
    """Numerical value of ``int_0^inf exp(-y) log y dy``, which should equal ``-euler_gamma``."""
    cfg = cfg or QuadratureConfig()
    value, _ = integrate_exp_weighted(np.log, cfg, envelope=((1.0, None),))
    return value


def exp_moment(s: float, cfg: QuadratureConfig | None = None) -> float:
    """Numerical value of ``int_0^inf exp(-y) y**s dy`` (equal to ``Gamma(s + 1)``)."""
    cfg = cfg or QuadratureConfig()
    if not s > -1.0:
        raise ValueError("the moment integral diverges for s <= -1")
    value, _ = integrate_exp_weighted(lambda y: y**s, cfg, envelope=((1.0, s),))
    return value
