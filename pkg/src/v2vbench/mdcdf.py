"""Interference CDF under maximum-reuse-distance allocation.

With vehicles sorted and resources assigned cyclically, the nodes sharing
a resource are every ``r_total``-th neighbor, so the distance from a
source to its co-resource neighbors follows gamma (Erlang) laws.  Only
the nearest co-resource interferer on each side of the receiver carries
appreciable power; the CDF of their summed power is a one-dimensional
convolution of two transformed-gamma laws.

Geometry (receiver at distance ``d_sd`` to the right of the source):

* usually the receiver sits before the first co-resource neighbor on the
  right; then the left interferer is the neighbor behind the source
  (receiver distance = neighbor distance + d_sd) and the right one is
  the neighbor ahead (receiver distance = neighbor distance - d_sd);
* otherwise the first right neighbor has already passed the receiver and
  acts as the near-side interferer from within the gap, while the
  second right neighbor interferes from beyond.

The first case alone is the fast "approximate" mode; "full" mixes both
cases with their exact probabilities.  All gamma densities are evaluated
in log space (shape up to ``2 * r_total``), and every convolution is
re-parameterized to the interferer-distance axis where the integrand is
a smooth gamma density times a bounded CDF factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from ._quad import integrate_adaptive
from .errors import ModelDomainError

__all__ = ["MdParams", "md_interference_cdf"]

_LOG_NEGLIGIBLE = -46.0  # e^-46 ~ 1e-20 relative mass cutoff


@dataclass(frozen=True)
class MdParams:
    """Inputs of the max-reuse-distance interference law.

    ``rho`` vehicles per meter, ``r_total`` resources per beacon period,
    ``beta`` path-loss exponent, ``pr0`` received power at 1 m (mW),
    ``d_sd`` source-destination distance (m).
    """

    rho: float
    r_total: int
    beta: float
    pr0: float
    d_sd: float

    def __post_init__(self):
        if min(self.rho, self.beta, self.pr0, self.d_sd) <= 0 or self.r_total < 1:
            raise ModelDomainError("all MD-law parameters must be positive")

    def interference_at(self, distance):
        """Received power from an interferer at the given distance (mW)."""
        return self.pr0 * np.asarray(distance, dtype=float) ** -self.beta

    def distance_for_interference(self, y):
        """Distance at which an interferer produces power ``y`` (inverse map)."""
        return (np.asarray(y, dtype=float) / self.pr0) ** (-1.0 / self.beta)


def _gamma_logpdf(x: np.ndarray, shape: float, rate: float) -> np.ndarray:
    out = np.full_like(x, -np.inf, dtype=float)
    pos = x > 0
    xp = x[pos]
    out[pos] = shape * math.log(rate) + (shape - 1.0) * np.log(xp) - rate * xp - special.gammaln(shape)
    return out


def _right_tail_cutoff(lo: float, shape: float, rate: float) -> float:
    """Abscissa beyond which the gamma density is negligible relative to ``lo``.

    The gamma log-density is concave, so stepping right from
    ``max(lo, mode)`` and doubling until the density falls by e^-46 is
    safe.
    """
    mode = max((shape - 1.0) / rate, 0.0)
    start = max(lo, mode)
    ref = _gamma_logpdf(np.array([start]), shape, rate)[0]
    step = max(math.sqrt(shape) / rate, 1.0 / rate)
    hi = start + step
    while _gamma_logpdf(np.array([hi]), shape, rate)[0] > ref + _LOG_NEGLIGIBLE:
        step *= 2.0
        hi += step
    return hi


def _nearside_cdf(p: MdParams, w: np.ndarray) -> np.ndarray:
    """CDF of the power from the interferer behind the source (case 1).

    That interferer is at least ``d_sd`` beyond the receiver, so its
    power never exceeds ``interference_at(d_sd)``; below that cap the
    probability is an upper gamma tail of the neighbor distance.
    """
    cap = p.interference_at(p.d_sd)
    out = np.zeros_like(w, dtype=float)
    out[w >= cap] = 1.0
    mid = (w > 0) & (w < cap)
    if np.any(mid):
        dist = p.distance_for_interference(w[mid]) - p.d_sd
        out[mid] = special.gammaincc(p.r_total, p.rho * dist)
    return out


def _gap_cdf(p: MdParams, w: np.ndarray) -> np.ndarray:
    """CDF of the power from a neighbor inside the source-receiver gap (case 2).

    Conditioned on the first right neighbor lying within ``d_sd``; its
    power is at least ``interference_at(d_sd)``.
    """
    cap = p.interference_at(p.d_sd)
    norm = special.gammainc(p.r_total, p.rho * p.d_sd)
    out = np.zeros_like(w, dtype=float)
    if norm <= 0:
        return out
    above = w > cap
    if np.any(above):
        dist = p.d_sd - p.distance_for_interference(w[above])
        out[above] = special.gammainc(p.r_total, p.rho * dist) / norm
    return out


def _farside_convolution(p: MdParams, y: float, left_cdf, n_right: float) -> float:
    """Convolve a left-interferer CDF with the far-side neighbor's power law.

    The far-side interferer is the ``n_right``-th neighbor on the right,
    conditioned beyond the receiver; its power at the receiver is
    ``interference_at(delta - d_sd)`` for neighbor distance ``delta``.
    Integration runs on the ``delta`` axis where the density is a plain
    gamma law (log-space), normalized by its mass beyond ``d_sd``.
    """
    d = p.d_sd
    rate = p.rho
    norm = special.gammaincc(n_right, rate * d)
    if norm <= 0:
        return 0.0
    # power from the far side must stay below y
    delta_min = d + float(p.distance_for_interference(y))
    lo = max(delta_min, d * (1.0 + 1e-12))
    lo_q = stats.gamma.ppf(1e-14, n_right, scale=1.0 / rate)
    lo = max(lo, lo_q)
    hi = _right_tail_cutoff(lo, n_right, rate)
    if not hi > lo:
        return 0.0
    points = [lo, hi]
    cap = p.interference_at(d)
    if y > cap:
        # beyond this neighbor distance the left CDF factor saturates at 1
        delta_sat = d + float(p.distance_for_interference(y - cap))
        if lo < delta_sat < hi:
            points = [lo, delta_sat, hi]

    def integrand(delta: np.ndarray) -> np.ndarray:
        z = p.interference_at(delta - d)
        return left_cdf(y - z) * np.exp(_gamma_logpdf(delta, n_right, rate))

    val = integrate_adaptive(
        integrand, points, rel_tol=1e-9, abs_tol=1e-16, where="md_interference_cdf"
    )
    return val / norm


def _cdf_case1(p: MdParams, y: float) -> float:
    """Single-case convolution (receiver before the first right neighbor)."""
    raw = _farside_convolution(p, y, lambda w: _nearside_cdf(p, w), p.r_total)
    # the far-side law here is used unconditioned, matching the
    # negligible-gap-probability regime this mode is meant for
    raw *= special.gammaincc(p.r_total, p.rho * p.d_sd)
    return raw


def _cdf_full(p: MdParams, y: float) -> float:
    """Mixture over both geometric cases with exact case probabilities."""
    case2 = special.gammainc(p.r_total, p.rho * p.d_sd)
    case1 = 1.0 - case2
    total = 0.0
    if case1 > 1e-300:
        t11 = _farside_convolution(p, y, lambda w: _nearside_cdf(p, w), p.r_total)
        total += case1 * case1 * t11
        if case2 > 1e-300:
            t12 = _farside_convolution(p, y, lambda w: _nearside_cdf(p, w), 2.0 * p.r_total)
            total += case1 * case2 * t12
    if case2 > 1e-300:
        if case1 > 1e-300:
            t21 = _farside_convolution(p, y, lambda w: _gap_cdf(p, w), p.r_total)
            total += case2 * case1 * t21
        t22 = _farside_convolution(p, y, lambda w: _gap_cdf(p, w), 2.0 * p.r_total)
        total += case2 * case2 * t22
    return total


def md_interference_cdf(p: MdParams, y, mode: str = "approximate"):
    """CDF of total interference under max-reuse-distance allocation.

    ``mode='approximate'`` evaluates the single dominant-case convolution
    and silently upgrades to the full mixture whenever its validity
    conditions fail (non-negligible probability of a neighbor inside the
    source-receiver gap, or an argument above the near-side power cap).
    ``mode='full'`` always evaluates the mixture.  Results are clamped to
    [0, 1].
    """
    if mode not in ("approximate", "full"):
        raise ValueError(f"mode must be 'approximate' or 'full', got {mode!r}")
    y_arr = np.asarray(y, dtype=float)
    flat = np.atleast_1d(y_arr).ravel()
    gap_prob = special.gammainc(p.r_total, p.rho * p.d_sd)
    cap = float(p.interference_at(p.d_sd))
    out = np.empty(flat.shape, dtype=float)
    for i, yi in enumerate(flat):
        if yi <= 0:
            out[i] = 0.0
            continue
        use_full = mode == "full" or gap_prob > 0.01 or yi >= cap
        val = _cdf_full(p, yi) if use_full else _cdf_case1(p, yi)
        out[i] = min(max(val, 0.0), 1.0)
    if y_arr.ndim == 0:
        return float(out[0])
    return out.reshape(y_arr.shape)
