"""The beacon-resource grid and its time/frequency indexing.

A beacon period holds ``r_total = r_freq * r_time`` beacon resources,
indexed 1-based.  Resource ``r`` occupies time slot
``((r - 1) mod r_time) + 1`` and frequency slot ``ceil(r / r_time)``, so
the inverse identity ``r = (freq - 1) * r_time + time`` holds exactly
(the 1-based modulo convention is forced by that identity at multiples of
``r_time``).  Two resources share a subframe iff their index difference
is a multiple of ``r_time``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = ["ResourceGrid", "CamConfig", "grid_from_cam", "time_slot", "freq_slot", "same_subframe"]

SUBFRAMES_PER_SECOND = 1000  # 1 ms LTE subframes
RBS_PER_RB_PAIR = 2


@dataclass(frozen=True)
class ResourceGrid:
    r_total: int
    r_time: int
    r_freq: int

    def __post_init__(self):
        if min(self.r_total, self.r_time, self.r_freq) < 1:
            raise ConfigurationError("grid dimensions must be >= 1")
        if self.r_total != self.r_time * self.r_freq:
            raise ConfigurationError(
                f"r_total must equal r_freq * r_time, got {self.r_total} != {self.r_freq}*{self.r_time}"
            )


@dataclass(frozen=True)
class CamConfig:
    """Beacon traffic parameters that size the resource grid."""

    beacon_frequency_hz: float = 10.0
    beacon_size_bytes: int = 300
    rbs_per_cam: int = 68
    rb_pairs_per_subframe: int = 40

    def __post_init__(self):
        if self.beacon_frequency_hz <= 0:
            raise ConfigurationError("beacon_frequency_hz must be > 0")
        if min(self.beacon_size_bytes, self.rbs_per_cam, self.rb_pairs_per_subframe) <= 0:
            raise ConfigurationError("CAM parameters must be positive")
        if self.rbs_per_cam > self.rb_pairs_per_subframe * RBS_PER_RB_PAIR:
            raise ConfigurationError(
                "a beacon must fit within one subframe "
                f"({self.rbs_per_cam} RBs > {self.rb_pairs_per_subframe * RBS_PER_RB_PAIR})"
            )

    @property
    def beacon_period_s(self) -> float:
        return 1.0 / self.beacon_frequency_hz


def grid_from_cam(cfg: CamConfig) -> ResourceGrid:
    """Size the grid from beacon cadence and per-beacon resource cost.

    ``r_time`` is the number of 1 ms subframes per beacon period;
    ``r_freq`` how many beacons fit side by side in one subframe.
    """
    r_time = int(SUBFRAMES_PER_SECOND // cfg.beacon_frequency_hz)
    if r_time < 1:
        raise ConfigurationError("beacon frequency leaves no whole subframe per period")
    r_freq = (cfg.rb_pairs_per_subframe * RBS_PER_RB_PAIR) // cfg.rbs_per_cam
    if r_freq < 1:
        raise ConfigurationError("subframe capacity is smaller than one beacon")
    return ResourceGrid(r_total=r_freq * r_time, r_time=r_time, r_freq=r_freq)


def _check_range(grid: ResourceGrid, r) -> np.ndarray:
    r = np.asarray(r)
    if np.any((r < 1) | (r > grid.r_total)):
        raise ValueError(f"resource index out of range 1..{grid.r_total}")
    return r


def time_slot(grid: ResourceGrid, r):
    """Time slot in 1..r_time occupied by resource ``r``."""
    r = _check_range(grid, r)
    return (r - 1) % grid.r_time + 1


def freq_slot(grid: ResourceGrid, r):
    """Frequency slot in 1..r_freq occupied by resource ``r``."""
    r = _check_range(grid, r)
    return (r - 1) // grid.r_time + 1


def same_subframe(grid: ResourceGrid, r_a, r_b):
    """Whether two resources are transmitted in the same time interval."""
    r_a = _check_range(grid, r_a)
    r_b = _check_range(grid, r_b)
    return np.abs(r_a - r_b) % grid.r_time == 0
