"""Resource allocation algorithms mapping a scenario onto the beacon grid.

Five allocators: uniform random (the pessimistic benchmark), cyclic
assignment in position order (the optimistic benchmark), a centralized
scheme enforcing a geographic reuse distance on error-prone positions, a
location-based graph-coloring scheme, and the autonomous sensing-based
scheme with semi-persistent reselection.  Each returns one resource
index per vehicle, ``BLOCKED`` (0) when a vehicle gets nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .radio import db_to_linear
from .resources import ResourceGrid
from .scenario import Scenario

__all__ = [
    "BLOCKED",
    "Allocation",
    "CrrConfig",
    "Mode4Config",
    "Mode4State",
    "allocate_rr",
    "allocate_md",
    "allocate_crr",
    "allocate_lgc",
    "mode4_init",
    "mode4_step",
    "mode4_candidates",
]

BLOCKED = 0


@dataclass(frozen=True)
class Allocation:
    """Per-vehicle resource indices in 1..r_total, or BLOCKED (0)."""

    resources: np.ndarray
    r_total: int

    def __post_init__(self):
        res = np.asarray(self.resources, dtype=np.int64)
        object.__setattr__(self, "resources", res)
        if res.ndim != 1:
            raise ConfigurationError("resources must be a 1-D array")
        if res.size and (res.min() < 0 or res.max() > self.r_total):
            raise ConfigurationError("resource indices out of range")

    @property
    def n(self) -> int:
        return int(self.resources.size)

    @property
    def assigned(self) -> np.ndarray:
        return self.resources != BLOCKED


def allocate_rr(n_vehicles: int, grid: ResourceGrid, rng: np.random.Generator) -> Allocation:
    """Independent uniform pick per vehicle; redrawn every call."""
    res = rng.integers(1, grid.r_total + 1, size=n_vehicles, dtype=np.int64)
    return Allocation(resources=res, r_total=grid.r_total)


def allocate_md(scenario: Scenario, grid: ResourceGrid) -> Allocation:
    """Cyclic assignment in position order (maximum reuse distance)."""
    res = np.arange(scenario.n, dtype=np.int64) % grid.r_total + 1
    return Allocation(resources=res, r_total=grid.r_total)


@dataclass(frozen=True)
class CrrConfig:
    """Centralized reuse-distance allocation parameters.

    ``position_error_sigma_m`` defaults to 100/1.96: a Gaussian error
    below 100 m in 95% of cases.
    """

    reuse_distance_m: float = 200.0
    position_error_sigma_m: float = 100.0 / 1.96

    def __post_init__(self):
        if self.reuse_distance_m < 0 or self.position_error_sigma_m < 0:
            raise ConfigurationError("CRR parameters must be >= 0")


def allocate_crr(
    scenario: Scenario, grid: ResourceGrid, cfg: CrrConfig, rng: np.random.Generator
) -> Allocation:
    """Greedy reuse-distance allocation on noisy positions.

    Vehicles are processed in position order; a resource is feasible when
    its nearest already-assigned user is at least the reuse distance away
    (both measured on the reported, error-prone positions).  The pick
    among feasible resources is uniform; a vehicle with no feasible
    resource is blocked.
    """
    n = scenario.n
    r_total = grid.r_total
    res = np.zeros(n, dtype=np.int64)
    if n == 0:
        return Allocation(resources=res, r_total=r_total)
    true_pos = scenario.positions
    length = scenario.road_length
    noisy = true_pos + rng.normal(0.0, cfg.position_error_sigma_m, size=n)
    if scenario.wrap:
        noisy = np.mod(noisy, length)

    # only recently processed vehicles can conflict: the noisy gap of a
    # pair further apart than reuse + 8*sigma*sqrt(2) clears the reuse
    # distance with overwhelming probability
    window = cfg.reuse_distance_m + 8.0 * cfg.position_error_sigma_m * math.sqrt(2.0)

    for i in range(n):
        lo = np.searchsorted(true_pos[:i], true_pos[i] - window)
        idx = np.arange(lo, i)
        if scenario.wrap and true_pos[i] + window >= length:
            head = np.searchsorted(true_pos[:i], true_pos[i] + window - length, side="right")
            head = min(head, lo)  # avoid double-counting when windows overlap
            if head > 0:
                idx = np.concatenate([np.arange(0, head), idx])
        if idx.size:
            cand = idx[res[idx] != BLOCKED]
        else:
            cand = idx
        feasible = np.ones(r_total + 1, dtype=bool)
        feasible[BLOCKED] = False
        if cand.size:
            gaps = np.abs(noisy[cand] - noisy[i])
            if scenario.wrap:
                gaps = np.minimum(gaps, length - gaps)
            conflicting = cand[gaps < cfg.reuse_distance_m]
            feasible[res[conflicting]] = False
        choices = np.nonzero(feasible)[0]
        if choices.size:
            res[i] = choices[rng.integers(choices.size)]
        else:
            res[i] = BLOCKED
    return Allocation(resources=res, r_total=r_total)


def allocate_lgc(scenario: Scenario, grid: ResourceGrid, rng: np.random.Generator) -> Allocation:
    """Location-based graph coloring with perfect positions.

    Vehicles are visited in random order; the first ``r_total`` get the
    distinct resources, every later vehicle takes the resource whose
    nearest current user is farthest away (unused resources count as
    infinitely far; ties break toward the lowest index).
    """
    n = scenario.n
    r_total = grid.r_total
    res = np.zeros(n, dtype=np.int64)
    order = rng.permutation(n)
    first = min(r_total, n)
    res[order[:first]] = np.arange(1, first + 1, dtype=np.int64)
    pos = scenario.positions
    for k in range(first, n):
        v = order[k]
        placed = order[:k]
        dists = scenario.pairwise_distance(pos[placed], pos[v])
        nearest = np.full(r_total + 1, np.inf)
        np.minimum.at(nearest, res[placed], dists)
        res[v] = int(np.argmax(nearest[1:])) + 1  # argmax takes the lowest index on ties
    return Allocation(resources=res, r_total=r_total)


@dataclass(frozen=True)
class Mode4Config:
    """Autonomous sensing-based selection parameters.

    The interference threshold is read as an absolute power (dBm).  The
    reselection counter is drawn uniformly over 0.5-1.5 s expressed in
    beacon periods.
    """

    beacon_period_s: float = 0.1
    i_th_dbm: float = -110.0
    sensing_window_s: float = 1.0
    selection_fraction: float = 0.2
    counter_min_s: float = 0.5
    counter_max_s: float = 1.5

    def __post_init__(self):
        if self.beacon_period_s <= 0 or self.sensing_window_s <= 0:
            raise ConfigurationError("periods must be > 0")
        if not 0 < self.selection_fraction <= 1:
            raise ConfigurationError("selection_fraction must be in (0, 1]")
        if not 0 < self.counter_min_s <= self.counter_max_s:
            raise ConfigurationError("counter range must satisfy 0 < min <= max")

    @property
    def i_th_mw(self) -> float:
        return float(db_to_linear(self.i_th_dbm))

    @property
    def window_periods(self) -> int:
        return max(1, math.ceil(self.sensing_window_s / self.beacon_period_s))

    @property
    def counter_range(self) -> tuple[int, int]:
        lo = max(1, math.ceil(self.counter_min_s / self.beacon_period_s))
        hi = max(lo, math.floor(self.counter_max_s / self.beacon_period_s))
        return lo, hi


@dataclass
class Mode4State:
    """Per-vehicle autonomous-selection state.

    ``sensed_window`` holds the most recent per-vehicle, per-resource
    received-power matrices (mW); ``busy`` flags resources whose latest
    measurement indicates an active reservation nearby.
    """

    resources: np.ndarray
    countdown: np.ndarray
    cfg: Mode4Config
    r_total: int
    sensed_window: list[np.ndarray] = field(default_factory=list)
    sensed_sum: np.ndarray | None = None
    busy: np.ndarray | None = None

    @property
    def n(self) -> int:
        return int(self.resources.size)

    @property
    def sensed_average(self) -> np.ndarray | None:
        if not self.sensed_window:
            return None
        return self.sensed_sum / len(self.sensed_window)


def mode4_init(n: int, grid: ResourceGrid, cfg: Mode4Config, rng: np.random.Generator) -> Mode4State:
    """Fresh state: uniform initial resources, uniform counters, no history."""
    lo, hi = cfg.counter_range
    return Mode4State(
        resources=rng.integers(1, grid.r_total + 1, size=n, dtype=np.int64),
        countdown=rng.integers(lo, hi + 1, size=n, dtype=np.int64),
        cfg=cfg,
        r_total=grid.r_total,
    )


def mode4_candidates(state: Mode4State, vehicle: int) -> np.ndarray:
    """Resources this vehicle may reselect: control-channel free, or sensed
    below the interference threshold.  Boolean mask indexed 0..r_total
    (index 0 unused).  Falls back to every resource when the mask empties.
    """
    mask = np.ones(state.r_total + 1, dtype=bool)
    mask[BLOCKED] = False
    avg = state.sensed_average
    if avg is None or state.busy is None:
        return mask
    free = ~state.busy[vehicle]
    low = avg[vehicle] < state.cfg.i_th_mw
    cand = free | low
    if not np.any(cand):
        return mask
    mask[1:] = cand
    return mask


def mode4_step(
    state: Mode4State,
    scenario: Scenario,
    grid: ResourceGrid,
    sensing_mw: np.ndarray | None,
    p_keep: float,
    rng: np.random.Generator,
) -> tuple[Mode4State, Allocation]:
    """Advance the autonomous scheme by one beacon period.

    ``sensing_mw`` is the per-vehicle, per-resource power received during
    the previous period (columns 0..r_total-1 for resources 1..r_total),
    or None before any history exists.  Vehicles whose counter expires
    redraw it and, with probability ``1 - p_keep``, pick uniformly among
    the least-interfered fifth of the grid (ties broken at random),
    preferring candidate resources and topping the pool up with the
    quietest excluded ones when exclusions leave fewer than a fifth.
    """
    if state.resources.size != scenario.n:
        raise ConfigurationError("state size does not match vehicle count")
    if grid.r_total != state.r_total:
        raise ConfigurationError("state grid does not match")
    cfg = state.cfg
    if sensing_mw is not None:
        sensing_mw = np.asarray(sensing_mw, dtype=float)
        if sensing_mw.shape != (state.n, state.r_total):
            raise ConfigurationError("sensing matrix must be n_vehicles x r_total")
        state.sensed_window.append(sensing_mw)
        state.sensed_sum = (
            sensing_mw.copy() if state.sensed_sum is None else state.sensed_sum + sensing_mw
        )
        if len(state.sensed_window) > cfg.window_periods:
            state.sensed_sum -= state.sensed_window.pop(0)
        state.busy = sensing_mw >= cfg.i_th_mw

    state.countdown -= 1
    expired = np.nonzero(state.countdown <= 0)[0]
    if expired.size:
        lo, hi = cfg.counter_range
        state.countdown[expired] = rng.integers(lo, hi + 1, size=expired.size)
        reselect = expired[rng.random(expired.size) < 1.0 - p_keep]
        avg = state.sensed_average
        pool_size = max(1, math.ceil(cfg.selection_fraction * state.r_total))
        for v in reselect:
            mask = mode4_candidates(state, v)
            excluded = ~mask[1:]
            sensed = np.zeros(state.r_total) if avg is None else avg[v]
            # candidates first, quietest first within each group; the random
            # permutation ahead of the stable sort breaks ties uniformly
            perm = rng.permutation(state.r_total)
            order = np.lexsort((sensed[perm], excluded[perm]))
            pool = perm[order[:pool_size]] + 1
            state.resources[v] = pool[rng.integers(pool.size)]
    return state, Allocation(resources=state.resources.copy(), r_total=state.r_total)
