"""Propagation, shadowing, noise, and SINR evaluation.

Power bookkeeping is linear (milliwatts) throughout; configs are in the
customary dB / dBm units and converted once.  The single-slope power law
``pr0 / d**beta`` is what the analytical benchmarks assume; the simulator
may optionally bend the law below a break distance (dual slope), which
leaves everything at and beyond the break unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "RadioConfig",
    "DualSlope",
    "ShadowField",
    "db_to_linear",
    "linear_to_db",
    "thermal_noise_dbm",
    "pr0",
    "rx_power",
    "sinr",
    "decode_ok",
]


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def thermal_noise_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Receiver noise power: -174 dBm/Hz plus bandwidth and noise figure.

    The bandwidth to use is a modelling choice: the full channel (10 MHz
    for the default setup) or only the spectrum a beacon occupies (34 RB
    pairs of 180 kHz = 6.12 MHz for the default 68-RB beacon).  The
    shipped defaults take the occupied-bandwidth reading.
    """
    if bandwidth_hz <= 0:
        raise ConfigurationError("bandwidth must be > 0")
    return -174.0 + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


@dataclass(frozen=True)
class DualSlope:
    """Near-field bend of the path-loss law, anchored at the break point.

    Below ``break_distance_m`` the exponent ``near_exponent`` applies,
    continuous with the far-field law at the break.  Simulation-only.
    """

    break_distance_m: float = 20.0
    near_exponent: float = 2.27

    def __post_init__(self):
        if self.break_distance_m <= 0 or self.near_exponent <= 0:
            raise ConfigurationError("dual-slope parameters must be > 0")


@dataclass(frozen=True)
class RadioConfig:
    """Link-budget and decoding parameters.

    ``noise_power_dbm`` is stored directly rather than derived, because
    the noise bandwidth is a modelling choice; use
    :func:`thermal_noise_dbm` to compute a value.  ``beta`` must exceed 1
    or the aggregate-interference series diverges.
    """

    pt_dbm: float = 23.0
    gt_db: float = 3.0
    gr_db: float = 3.0
    l0_db: float = 20.06
    beta: float = 4.0
    noise_power_dbm: float = -97.13
    gamma_min_db: float = 2.8
    shadow_sigma_db: float = 3.0
    decorr_distance_m: float = 25.0
    dual_slope: DualSlope | None = None

    def __post_init__(self):
        if not self.beta > 1:
            raise ConfigurationError(f"path-loss exponent must be > 1, got {self.beta}")
        if self.shadow_sigma_db < 0:
            raise ConfigurationError("shadow_sigma_db must be >= 0")
        if self.decorr_distance_m <= 0:
            raise ConfigurationError("decorr_distance_m must be > 0")

    @property
    def noise_mw(self) -> float:
        return float(db_to_linear(self.noise_power_dbm))

    @property
    def gamma_min_linear(self) -> float:
        return float(db_to_linear(self.gamma_min_db))


def pr0(cfg: RadioConfig) -> float:
    """Received power at 1 m without channel variability, in mW."""
    return float(db_to_linear(cfg.pt_dbm + cfg.gt_db + cfg.gr_db - cfg.l0_db))


def rx_power(cfg: RadioConfig, distance_m, shadow_linear=1.0, use_dual_slope: bool = False):
    """Received power in mW at the given distance.

    ``shadow_linear`` multiplies the deterministic law.  With
    ``use_dual_slope`` and a configured :class:`DualSlope`, distances
    below the break follow the near exponent (simulation only).
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    p0 = pr0(cfg)
    if use_dual_slope and cfg.dual_slope is not None:
        ds = cfg.dual_slope
        far = p0 * d ** -cfg.beta
        near = p0 * ds.break_distance_m ** -cfg.beta * (d / ds.break_distance_m) ** -ds.near_exponent
        out = np.where(d < ds.break_distance_m, near, far)
    else:
        out = p0 * d ** -cfg.beta
    return out * shadow_linear


def sinr(cfg: RadioConfig, rx_power_mw, interference_mw_sum=0.0):
    """Signal to interference-plus-noise ratio (dimensionless)."""
    return np.asarray(rx_power_mw, dtype=float) / (cfg.noise_mw + np.asarray(interference_mw_sum, dtype=float))


def decode_ok(cfg: RadioConfig, gamma):
    """Whether a packet at SINR ``gamma`` decodes (strictly above threshold)."""
    return np.asarray(gamma, dtype=float) > cfg.gamma_min_linear


class ShadowField:
    """Correlated log-normal shadowing over the ordered links of one snapshot.

    Holds a symmetric matrix of per-link shadowing values in dB (zero
    mean, ``sigma_db`` std).  Between snapshots each link decorrelates as
    ``exp(-displacement / decorr_m)`` where the link displacement is the
    sum of the two endpoint movements; static snapshots keep their field.
    """

    def __init__(self, n: int, sigma_db: float, decorr_m: float, rng: np.random.Generator):
        self.n = n
        self.sigma_db = sigma_db
        self.decorr_m = decorr_m
        self._rng = rng
        self.db = self._draw()

    def _draw(self) -> np.ndarray:
        z = self._rng.normal(0.0, self.sigma_db, size=(self.n, self.n))
        upper = np.triu(z, k=1)
        field = upper + upper.T
        np.fill_diagonal(field, 0.0)
        return field

    def advance(self, displacement_m: np.ndarray) -> None:
        """Evolve every link after per-vehicle movements ``displacement_m``."""
        disp = np.abs(np.asarray(displacement_m, dtype=float))
        if disp.shape != (self.n,):
            raise ValueError("displacement vector must have one entry per vehicle")
        link_disp = disp[:, None] + disp[None, :]
        a = np.exp(-link_disp / self.decorr_m)
        self.db = a * self.db + np.sqrt(1.0 - a**2) * self._draw()

    @property
    def linear(self) -> np.ndarray:
        return 10.0 ** (self.db / 10.0)
