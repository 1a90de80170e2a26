"""Totally skewed stable law for aggregate interference under random allocation.

With vehicles on a homogeneous 1-D Poisson process and resources chosen
uniformly at random, the interferers on one resource are a thinned
Poisson process and their aggregate received power follows a one-sided
stable distribution with stability index ``1/beta`` and unit skewness.
Its characteristic function (location 0, scale ``c``) is

    phi(t) = exp(-|c*t|**alpha * (1 - 1j*sign(t)*tan(pi*alpha/2)))

and the CDF is recovered by numerically inverting ``phi``.  A direct
sine-transform inversion oscillates hopelessly for the parameter scales
of interest (``alpha`` as small as 1/4 and arguments spanning decades),
so the inversion integral is evaluated after rotating the integration
contour, which turns it into a smooth, monotone integrand over a finite
angular interval; no oscillation survives the rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._quad import integrate_adaptive
from .errors import ModelDomainError, NumericError
from .radio import RadioConfig, pr0
from .resources import ResourceGrid

__all__ = ["StableParams", "rr_stable_params", "stable_cdf", "levy_cdf_rr", "stable_ccdf_series"]

_EXP_UNDERFLOW = 745.0  # exp(-x) underflows below this
_MIN_LOG = -745.0


@dataclass(frozen=True)
class StableParams:
    """One-sided stable law: index in (0,1), skew 1, location 0, scale >= 0."""

    alpha: float
    skew: float = 1.0
    scale: float = 0.0
    location: float = 0.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ModelDomainError(f"stability index must be in (0, 1), got {self.alpha}")
        if self.skew != 1.0 or self.location != 0.0:
            raise ModelDomainError("only the totally skewed, zero-location family is supported")
        if self.scale < 0:
            raise ModelDomainError("scale must be >= 0")


def rr_stable_params(rho: float, grid: ResourceGrid, radio: RadioConfig) -> StableParams:
    """Stable-law parameters of total interference under random allocation.

    Interferer density is ``rho / r_total`` (random picks thin the
    process), and the scale collects the received power at 1 m with the
    path-loss exponent:

        scale = pr0 * (2 * rho_rr * Gamma((beta-1)/beta) * cos(pi/(2*beta)))**beta
    """
    if rho <= 0:
        raise ModelDomainError("density must be > 0")
    beta = radio.beta
    if beta <= 1:
        raise ModelDomainError("aggregate interference diverges for path-loss exponent <= 1")
    rho_rr = rho / grid.r_total
    scale = pr0(radio) * (
        2.0 * rho_rr * special.gamma((beta - 1.0) / beta) * math.cos(math.pi / (2.0 * beta))
    ) ** beta
    return StableParams(alpha=1.0 / beta, scale=scale)


def _angular_kernel(alpha: float, theta: np.ndarray) -> np.ndarray:
    """Zolotarev angular function V(theta) for skew 1, on (-pi/2, pi/2).

    V is positive and increases monotonically from a finite value at
    -pi/2 to +infinity at +pi/2; computed in log space.
    """
    a = alpha
    half_pi = 0.5 * math.pi
    log_cos_a = math.log(math.cos(a * half_pi))
    with np.errstate(divide="ignore"):
        log_v = (
            (log_cos_a + np.log(np.cos(theta))) / (a - 1.0)
            - (a / (a - 1.0)) * np.log(np.sin(a * (half_pi + theta)))
            + np.log(np.cos(a * half_pi + (a - 1.0) * theta))
        )
    return np.exp(log_v)


def _kernel_floor(alpha: float) -> float:
    """Limit of the angular kernel at theta -> -pi/2 (its minimum)."""
    a = alpha
    return (
        math.cos(a * math.pi / 2.0) ** (1.0 / (a - 1.0))
        * a ** (-a / (a - 1.0))
        * (1.0 - a)
    )


def _stable_cdf_scalar(alpha: float, w: float) -> float:
    """CDF of the standardized law at scaled argument ``w = y / scale``."""
    if w <= 0:
        return 0.0
    # exponent weight (y/c)^(alpha/(alpha-1)); alpha<1 makes the power negative
    power = alpha / (alpha - 1.0)
    log_weight = power * math.log(w)
    v_min = _kernel_floor(alpha)
    if log_weight + math.log(v_min) > math.log(_EXP_UNDERFLOW):
        return 0.0  # integrand underflows everywhere
    weight = math.exp(log_weight)

    def integrand(theta: np.ndarray) -> np.ndarray:
        expo = weight * _angular_kernel(alpha, theta)
        out = np.zeros_like(expo)
        ok = expo < _EXP_UNDERFLOW
        out[ok] = np.exp(-expo[ok])
        return out

    half_pi = 0.5 * math.pi
    eps = 1e-12
    # locate the transition where the exponent passes 1, to hand the
    # adaptive panels a breakpoint on the cliff
    lo, hi = -half_pi + eps, half_pi - eps
    if weight * v_min >= 1.0:
        split = lo
    elif weight * _angular_kernel(alpha, np.array([hi]))[0] <= 1.0:
        split = hi
    else:
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if weight * _angular_kernel(alpha, np.array([mid]))[0] > 1.0:
                hi = mid
            else:
                lo = mid
        split = 0.5 * (lo + hi)
    points = sorted({-half_pi + eps, split, half_pi - eps})
    val = integrate_adaptive(
        integrand, points, rel_tol=1e-11, abs_tol=1e-13, where="stable_cdf"
    ) / math.pi
    if not np.isfinite(val):
        raise NumericError(f"stable_cdf: non-finite quadrature result at w={w}")
    return min(max(val, 0.0), 1.0)


def stable_cdf(p: StableParams, y):
    """CDF of the one-sided stable law at interference level(s) ``y``.

    Scalar in, scalar out; arrays are mapped elementwise.  Values at or
    below zero have probability zero (the law is supported on the
    positive axis).
    """
    y_arr = np.asarray(y, dtype=float)
    flat = np.atleast_1d(y_arr).ravel()
    if p.scale == 0:  # degenerate at zero interference
        out = (flat >= 0).astype(float)
    else:
        out = np.array([_stable_cdf_scalar(p.alpha, yi / p.scale) for yi in flat])
    if y_arr.ndim == 0:
        return float(out[0])
    return out.reshape(y_arr.shape)


def levy_cdf_rr(rho_rr: float, pr0_mw: float, y):
    """Closed-form interference CDF for path-loss exponent 2.

    ``erfc(rho_rr * Gamma(1/2) * sqrt(pr0 / y))`` with the thinned
    interferer density ``rho_rr``; zero for ``y <= 0``.
    """
    y_arr = np.asarray(y, dtype=float)
    out = np.zeros_like(y_arr, dtype=float)
    pos = y_arr > 0
    out[pos] = special.erfc(rho_rr * math.sqrt(math.pi) * np.sqrt(pr0_mw / y_arr[pos]))
    return out[()] if y_arr.ndim else float(out)


def stable_ccdf_series(p: StableParams, y: float, max_terms: int = 200) -> float:
    """Tail probability via the convergent power series of the one-sided law.

    Useful as an independent cross-check for moderate to large ``y``;
    suffers cancellation when ``y`` is far into the lower tail.  The
    series variable is ``lam * y**(-alpha)`` with
    ``lam = scale**alpha / cos(pi*alpha/2)`` (the Laplace-exponent scale).
    """
    a = p.alpha
    lam = p.scale**a / math.cos(math.pi * a / 2.0)
    x = lam * y**-a
    total = 0.0
    for k in range(1, max_terms + 1):
        term = (
            (-1.0) ** (k + 1)
            * math.exp(special.gammaln(a * k) + k * math.log(x) - special.gammaln(k + 1))
            * math.sin(k * math.pi * a)
        )
        total += term
        if abs(term) < 1e-16 * max(abs(total), 1e-300) and k > 4:
            break
    return total / math.pi
