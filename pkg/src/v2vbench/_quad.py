"""Small quadrature helpers shared by the analytical routines.

The integrands here are smooth between known breakpoints, so composite
Gauss-Legendre panels with interval-halving error control are both fast
and robust.  Integrands must accept a vector of abscissae.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import NumericError


@lru_cache(maxsize=None)
def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel(f, a: float, b: float, order: int) -> float:
    x, w = _gl_nodes(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half * float(np.dot(w, f(mid + half * x)))


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    breakpoints,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-14,
    order: int = 24,
    max_splits: int = 2000,
    where: str = "integrate_adaptive",
) -> float:
    """Integrate ``f`` over consecutive ``breakpoints`` segments.

    Each segment is bisected until one panel and its two halves agree to
    tolerance.  Raises :class:`NumericError` when the split budget runs
    out before convergence.
    """
    pts = [float(p) for p in breakpoints]
    stack = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1) if pts[i + 1] > pts[i]]
    total = 0.0
    splits = 0
    while stack:
        a, b = stack.pop()
        coarse = _panel(f, a, b, order)
        m = 0.5 * (a + b)
        fine = _panel(f, a, m, order) + _panel(f, m, b, order)
        err = abs(fine - coarse)
        if err <= max(abs_tol, rel_tol * abs(fine)) or (b - a) < 1e-14 * max(abs(a), abs(b), 1.0):
            total += fine
            continue
        splits += 1
        if splits > max_splits:
            raise NumericError(
                f"{where}: quadrature did not converge (last segment [{a}, {b}], error {err:.3e})"
            )
        stack.append((a, m))
        stack.append((m, b))
    return total


@lru_cache(maxsize=None)
def gauss_hermite_lognormal(n: int, sigma_db: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (linear shadowing values) and weights for the shadowing average.

    Averages a function of a log-normal factor whose dB value is
    N(0, sigma_db^2): ``E[f] = sum(w_i * f(v_i))`` with the returned
    ``v_i`` linear and ``w_i`` summing to 1.
    """
    x, w = np.polynomial.hermite.hermgauss(n)
    db_values = np.sqrt(2.0) * sigma_db * x
    return 10.0 ** (db_values / 10.0), w / np.sqrt(np.pi)
