"""Monte Carlo engine: per-period allocation, SINR with all interferers,
half-duplex losses, and distance-binned reception statistics.

A replication ("drop") is one vehicle snapshot held for a number of
beacon periods (fresh Poisson drop, or a window of consecutive trace
snapshots).  Within a period every ordered transmitter-receiver pair in
range is evaluated: the link is lost when the receiver transmits in the
same subframe, when the transmitter is blocked, or when the SINR over
noise plus the summed power of every co-resource transmitter falls at or
below the decoding threshold.  Every link, interferers included, carries
its own correlated log-normal shadowing.

Replications use independent child seeds of the master seed and are
merged in replication order, so results are bit-identical no matter how
many workers run them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .allocators import (
    BLOCKED,
    Allocation,
    CrrConfig,
    Mode4Config,
    allocate_crr,
    allocate_lgc,
    allocate_md,
    allocate_rr,
    mode4_init,
    mode4_step,
)
from .errors import ConfigurationError
from .radio import RadioConfig, ShadowField, pr0
from .resources import ResourceGrid
from .scenario import Scenario, ScenarioConfig, generate_ppp

__all__ = [
    "SimConfig",
    "PrpStats",
    "EmpiricalCdf",
    "DEFAULT_ALGORITHMS",
    "run_drop",
    "run_experiment",
    "interference_oracle",
]

DEFAULT_ALGORITHMS = ("rr", "md", "crr", "lgc", "m4:0", "m4:0.8")


@dataclass(frozen=True)
class SimConfig:
    """Replication plan for one experiment.

    ``algorithms`` entries are ``rr``, ``md``, ``crr``, ``lgc`` or
    ``m4:<p_keep>``.  Confidence intervals need at least two drops.
    """

    drops: int = 100
    beacon_periods_per_drop: int = 4
    bin_edges: tuple[float, ...] = tuple(np.arange(25.0, 625.0, 25.0))
    algorithms: tuple[str, ...] = ("rr", "md")
    max_eval_distance_m: float = 600.0
    seed: int = 0
    use_dual_slope: bool = False
    mode4_warmup_s: float = 2.0
    seam_guard_m: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if self.drops < 2:
            raise ConfigurationError("need at least 2 drops for confidence intervals")
        if self.beacon_periods_per_drop < 1:
            raise ConfigurationError("need at least one beacon period per drop")
        edges = np.asarray(self.bin_edges, dtype=float)
        if edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ConfigurationError("bin edges must be strictly increasing")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")


@dataclass
class PrpStats:
    """Per-algorithm, per-bin reception counts aggregated over drops."""

    bin_edges: np.ndarray
    algorithms: tuple[str, ...]
    received: np.ndarray  # (n_algo, drops, n_bins)
    eligible: np.ndarray  # (n_algo, drops, n_bins)
    blocked: np.ndarray  # (n_algo, drops) vehicle-periods without a resource
    opportunities: np.ndarray  # (n_algo, drops) vehicle-periods in total

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def _index(self, algorithm: str) -> int:
        try:
            return self.algorithms.index(algorithm)
        except ValueError:
            raise KeyError(f"no such algorithm in stats: {algorithm!r}") from None

    def per_drop_prp(self, algorithm: str) -> np.ndarray:
        a = self._index(algorithm)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(
                self.eligible[a] > 0, self.received[a] / self.eligible[a], np.nan
            )

    def mean(self, algorithm: str) -> np.ndarray:
        return np.nanmean(self.per_drop_prp(algorithm), axis=0)

    def ci_halfwidth(self, algorithm: str) -> np.ndarray:
        """95% Student-t half-width of the across-drop mean, per bin."""
        ratios = self.per_drop_prp(algorithm)
        n = np.sum(~np.isnan(ratios), axis=0)
        std = np.nanstd(ratios, axis=0, ddof=1)
        out = np.full(ratios.shape[1], np.nan)
        ok = n >= 2
        out[ok] = sps.t.ppf(0.975, n[ok] - 1) * std[ok] / np.sqrt(n[ok])
        return out

    def blocked_fraction(self, algorithm: str) -> float:
        a = self._index(algorithm)
        total = self.opportunities[a].sum()
        return float(self.blocked[a].sum() / total) if total else 0.0

    def merged_with(self, other: "PrpStats") -> "PrpStats":
        if self.algorithms != other.algorithms or not np.array_equal(
            self.bin_edges, other.bin_edges
        ):
            raise ValueError("cannot merge stats with different layout")
        return PrpStats(
            bin_edges=self.bin_edges,
            algorithms=self.algorithms,
            received=np.concatenate([self.received, other.received], axis=1),
            eligible=np.concatenate([self.eligible, other.eligible], axis=1),
            blocked=np.concatenate([self.blocked, other.blocked], axis=1),
            opportunities=np.concatenate([self.opportunities, other.opportunities], axis=1),
        )


class _Allocator:
    """Per-drop allocation driver; subclasses may keep state across periods."""

    name = "base"
    warmup_periods = 0

    def reset(self, scenario: Scenario, grid: ResourceGrid, rng: np.random.Generator) -> None:
        pass

    def allocate(
        self,
        scenario: Scenario,
        grid: ResourceGrid,
        sensing_mw: np.ndarray | None,
        rng: np.random.Generator,
    ) -> Allocation:
        raise NotImplementedError

    @property
    def needs_sensing(self) -> bool:
        return False


class _RandomAllocator(_Allocator):
    name = "rr"

    def allocate(self, scenario, grid, sensing_mw, rng):
        return allocate_rr(scenario.n, grid, rng)


class _MaxReuseAllocator(_Allocator):
    name = "md"

    def allocate(self, scenario, grid, sensing_mw, rng):
        return allocate_md(scenario, grid)


class _ReuseDistanceAllocator(_Allocator):
    name = "crr"

    def __init__(self, cfg: CrrConfig):
        self.cfg = cfg

    def allocate(self, scenario, grid, sensing_mw, rng):
        return allocate_crr(scenario, grid, self.cfg, rng)


class _GraphColoringAllocator(_Allocator):
    name = "lgc"

    def allocate(self, scenario, grid, sensing_mw, rng):
        return allocate_lgc(scenario, grid, rng)


class _Mode4Allocator(_Allocator):
    def __init__(self, p_keep: float, cfg: Mode4Config, warmup_periods: int):
        self.p_keep = p_keep
        self.cfg = cfg
        self.warmup_periods = warmup_periods
        self.name = f"m4:{p_keep:g}"
        self._state = None
        self._ids = None

    @property
    def needs_sensing(self) -> bool:
        return True

    def reset(self, scenario, grid, rng):
        self._state = mode4_init(scenario.n, grid, self.cfg, rng)
        self._ids = scenario.ids

    def _realign(self, scenario, grid, rng):
        """Carry state across snapshots by vehicle id; new vehicles start fresh."""
        if self._state is None or (self._ids is None and self._state.n != scenario.n):
            self.reset(scenario, grid, rng)
            return
        if self._ids is None or scenario.ids is None:
            if self._state.n != scenario.n:
                self.reset(scenario, grid, rng)
            return
        if np.array_equal(self._ids, scenario.ids):
            return
        old_index = {int(v): k for k, v in enumerate(self._ids)}
        fresh = mode4_init(scenario.n, grid, self.cfg, rng)
        keep_new = []
        keep_old = []
        for k, vid in enumerate(scenario.ids):
            j = old_index.get(int(vid))
            if j is not None:
                keep_new.append(k)
                keep_old.append(j)
        if keep_new:
            kn = np.asarray(keep_new)
            ko = np.asarray(keep_old)
            fresh.resources[kn] = self._state.resources[ko]
            fresh.countdown[kn] = self._state.countdown[ko]
            if self._state.sensed_window:
                fresh.sensed_window = [m[ko][...] for m in self._state.sensed_window]
                filled = []
                for m in fresh.sensed_window:
                    full = np.zeros((scenario.n, grid.r_total))
                    full[kn] = m
                    filled.append(full)
                fresh.sensed_window = filled
                fresh.sensed_sum = sum(fresh.sensed_window)
                if self._state.busy is not None:
                    fresh.busy = np.zeros((scenario.n, grid.r_total), dtype=bool)
                    fresh.busy[kn] = self._state.busy[ko]
        self._state = fresh
        self._ids = scenario.ids

    def allocate(self, scenario, grid, sensing_mw, rng):
        self._realign(scenario, grid, rng)
        self._state, alloc = mode4_step(self._state, scenario, grid, sensing_mw, self.p_keep, rng)
        return alloc


def make_allocator(
    name: str,
    crr_cfg: CrrConfig | None = None,
    mode4_cfg: Mode4Config | None = None,
    mode4_warmup_s: float = 2.0,
) -> _Allocator:
    """Build an allocation driver from its configuration name."""
    if name == "rr":
        return _RandomAllocator()
    if name == "md":
        return _MaxReuseAllocator()
    if name == "crr":
        return _ReuseDistanceAllocator(crr_cfg or CrrConfig())
    if name == "lgc":
        return _GraphColoringAllocator()
    if name.startswith("m4:"):
        p_keep = float(name.split(":", 1)[1])
        if not 0 <= p_keep <= 1:
            raise ConfigurationError(f"p_keep must be in [0, 1], got {p_keep}")
        cfg = mode4_cfg or Mode4Config()
        warmup = math.ceil(mode4_warmup_s / cfg.beacon_period_s)
        return _Mode4Allocator(p_keep, cfg, warmup)
    raise ConfigurationError(f"unknown algorithm {name!r}")


def _distance_matrix(scenario: Scenario) -> np.ndarray:
    pos = scenario.positions
    d = np.abs(pos[:, None] - pos[None, :])
    if scenario.wrap:
        np.minimum(d, scenario.road_length - d, out=d)
    return d


def _power_matrix(
    scenario: Scenario, radio: RadioConfig, shadow: ShadowField, use_dual_slope: bool
) -> np.ndarray:
    """Per-link received power (mW), symmetric, zero diagonal."""
    d = _distance_matrix(scenario)
    np.fill_diagonal(d, np.inf)
    p0 = pr0(radio)
    with np.errstate(divide="ignore"):
        w = p0 * d**-radio.beta
    if use_dual_slope and radio.dual_slope is not None:
        ds = radio.dual_slope
        near = d < ds.break_distance_m
        if np.any(near):
            w[near] = (
                p0
                * ds.break_distance_m**-radio.beta
                * (d[near] / ds.break_distance_m) ** -ds.near_exponent
            )
    w *= shadow.linear
    np.fill_diagonal(w, 0.0)
    return w


@dataclass
class _PairIndex:
    tx: np.ndarray
    rx: np.ndarray
    bins: np.ndarray
    eligible_per_period: np.ndarray


def _pair_index(
    scenario: Scenario,
    distance: np.ndarray,
    bin_edges: np.ndarray,
    max_eval: float,
    seam_guard_m: float = 0.0,
) -> _PairIndex:
    """Index of evaluated (tx, rx) pairs with their distance bins.

    On a ring, the cyclic allocation has one seam at coordinate zero
    where co-resource spacings are irregular whenever the vehicle count
    is not a multiple of the grid size; ``seam_guard_m`` excludes pairs
    with either endpoint that close to the seam from the statistics (the
    vehicles still transmit and interfere).
    """
    n_bins = bin_edges.size - 1
    mask = (distance >= bin_edges[0]) & (distance < bin_edges[-1]) & (distance <= max_eval)
    np.fill_diagonal(mask, False)
    if seam_guard_m > 0 and scenario.wrap:
        core = (scenario.positions >= seam_guard_m) & (
            scenario.positions <= scenario.road_length - seam_guard_m
        )
        mask &= core[:, None] & core[None, :]
    tx, rx = np.nonzero(mask)
    bins = np.digitize(distance[tx, rx], bin_edges) - 1
    eligible = np.bincount(bins, minlength=n_bins)
    return _PairIndex(tx=tx, rx=rx, bins=bins, eligible_per_period=eligible)


def _count_period(
    pairs: _PairIndex,
    alloc: Allocation,
    w: np.ndarray,
    per_resource: np.ndarray,
    grid: ResourceGrid,
    radio: RadioConfig,
    n_bins: int,
) -> np.ndarray:
    res = alloc.resources
    r_tx = res[pairs.tx]
    r_rx = res[pairs.rx]
    ok = r_tx != BLOCKED
    # half duplex: receiver busy transmitting in the transmitter's subframe
    both = ok & (r_rx != BLOCKED)
    hd = np.zeros(pairs.tx.size, dtype=bool)
    hd[both] = (np.abs(r_tx[both] - r_rx[both]) % grid.r_time) == 0
    ok &= ~hd
    if np.any(ok):
        wanted = w[pairs.rx[ok], pairs.tx[ok]]
        interference = per_resource[pairs.rx[ok], r_tx[ok] - 1] - wanted
        decoded = wanted > radio.gamma_min_linear * (radio.noise_mw + interference)
        good = np.zeros(pairs.tx.size, dtype=bool)
        good[np.nonzero(ok)[0][decoded]] = True
    else:
        good = np.zeros(pairs.tx.size, dtype=bool)
    return np.bincount(pairs.bins[good], minlength=n_bins)


def _resource_onehot(alloc: Allocation, r_total: int) -> np.ndarray:
    e = np.zeros((alloc.n, r_total))
    assigned = alloc.assigned
    e[np.nonzero(assigned)[0], alloc.resources[assigned] - 1] = 1.0
    return e


def run_drop(
    scenario: Scenario,
    grid: ResourceGrid,
    radio: RadioConfig,
    allocator: _Allocator,
    periods: int,
    rng: np.random.Generator,
    bin_edges=None,
    max_eval_distance_m: float = 600.0,
    use_dual_slope: bool = False,
    seam_guard_m: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Run one static-snapshot replication; returns (received, eligible) per bin.

    Periods beyond the allocator's warm-up are counted; sensing-based
    allocators receive the previous period's per-resource power matrix.
    """
    edges = np.asarray(
        bin_edges if bin_edges is not None else np.arange(25.0, 625.0, 25.0), dtype=float
    )
    n_bins = edges.size - 1
    shadow = ShadowField(scenario.n, radio.shadow_sigma_db, radio.decorr_distance_m, rng)
    w = _power_matrix(scenario, radio, shadow, use_dual_slope)
    pairs = _pair_index(scenario, _distance_matrix(scenario), edges, max_eval_distance_m, seam_guard_m)
    allocator.reset(scenario, grid, rng)
    received = np.zeros(n_bins, dtype=np.int64)
    eligible = np.zeros(n_bins, dtype=np.int64)
    sensing = None
    total = allocator.warmup_periods + periods
    for period in range(total):
        alloc = allocator.allocate(scenario, grid, sensing, rng)
        per_resource = w @ _resource_onehot(alloc, grid.r_total)
        if allocator.needs_sensing:
            sensing = per_resource
        if period >= allocator.warmup_periods:
            received += _count_period(pairs, alloc, w, per_resource, grid, radio, n_bins)
            eligible += pairs.eligible_per_period
    return received, eligible


def _scenario_seed(ss: np.random.SeedSequence) -> int:
    state = ss.generate_state(2)
    return int(state[0]) | (int(state[1]) << 32)


def _run_one_replication(args) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    (
        drop_ss,
        scenario_source,
        drop_index,
        grid,
        radio,
        cfg,
        crr_cfg,
        mode4_cfg,
    ) = args
    edges = np.asarray(cfg.bin_edges, dtype=float)
    n_bins = edges.size - 1
    n_algo = len(cfg.algorithms)
    scen_ss, shadow_ss, *algo_ss = drop_ss.spawn(2 + n_algo)

    if isinstance(scenario_source, ScenarioConfig):
        scen_cfg = ScenarioConfig(
            density=scenario_source.density,
            road_length=scenario_source.road_length,
            wrap=scenario_source.wrap,
            seed=_scenario_seed(scen_ss),
        )
        snapshots = None
        scenario0 = generate_ppp(scen_cfg)
    else:
        all_snapshots = list(scenario_source)
        periods_needed = cfg.beacon_periods_per_drop
        start = drop_index * periods_needed
        if start + periods_needed > len(all_snapshots):
            raise ConfigurationError(
                f"trace exhausted: drop {drop_index} needs snapshots "
                f"{start}..{start + periods_needed - 1} but only {len(all_snapshots)} exist"
            )
        snapshots = all_snapshots[start : start + periods_needed]
        scenario0 = snapshots[0]

    received = np.zeros((n_algo, n_bins), dtype=np.int64)
    eligible = np.zeros((n_algo, n_bins), dtype=np.int64)
    blocked = np.zeros(n_algo, dtype=np.int64)
    opportunities = np.zeros(n_algo, dtype=np.int64)

    allocators = [
        make_allocator(name, crr_cfg, mode4_cfg, cfg.mode4_warmup_s) for name in cfg.algorithms
    ]
    rngs = [np.random.default_rng(s) for s in algo_ss]

    if snapshots is None:
        # static drop: one shadow field and power matrix reused across periods
        shadow = ShadowField(
            scenario0.n, radio.shadow_sigma_db, radio.decorr_distance_m,
            np.random.default_rng(shadow_ss),
        )
        w = _power_matrix(scenario0, radio, shadow, cfg.use_dual_slope)
        pairs = _pair_index(scenario0, _distance_matrix(scenario0), edges, cfg.max_eval_distance_m, cfg.seam_guard_m)
        for a, (alloc_driver, rng) in enumerate(zip(allocators, rngs)):
            alloc_driver.reset(scenario0, grid, rng)
            sensing = None
            warmup = alloc_driver.warmup_periods
            for period in range(warmup + cfg.beacon_periods_per_drop):
                alloc = alloc_driver.allocate(scenario0, grid, sensing, rng)
                per_resource = w @ _resource_onehot(alloc, grid.r_total)
                if alloc_driver.needs_sensing:
                    sensing = per_resource
                if period >= warmup:
                    received[a] += _count_period(pairs, alloc, w, per_resource, grid, radio, n_bins)
                    eligible[a] += pairs.eligible_per_period
                    blocked[a] += int(np.sum(~alloc.assigned))
                    opportunities[a] += alloc.n
    else:
        # moving snapshots: shadow decorrelates with displacement, power
        # matrix rebuilt per period; warm-up periods inside the window are
        # left uncounted per algorithm
        shadow = None
        prev_positions = None
        sensings: list[np.ndarray | None] = [None] * n_algo
        for alloc_driver, rng in zip(allocators, rngs):
            alloc_driver.reset(snapshots[0], grid, rng)
        for period, snap in enumerate(snapshots):
            if shadow is None or shadow.n != snap.n:
                shadow = ShadowField(
                    snap.n, radio.shadow_sigma_db, radio.decorr_distance_m,
                    np.random.default_rng(shadow_ss.spawn(1)[0]),
                )
            elif prev_positions is not None:
                shadow.advance(snap.positions - prev_positions)
            prev_positions = snap.positions
            w = _power_matrix(snap, radio, shadow, cfg.use_dual_slope)
            pairs = _pair_index(snap, _distance_matrix(snap), edges, cfg.max_eval_distance_m, cfg.seam_guard_m)
            for a, (alloc_driver, rng) in enumerate(zip(allocators, rngs)):
                alloc = alloc_driver.allocate(snap, grid, sensings[a], rng)
                per_resource = w @ _resource_onehot(alloc, grid.r_total)
                if alloc_driver.needs_sensing:
                    sensings[a] = per_resource
                if period >= alloc_driver.warmup_periods:
                    received[a] += _count_period(pairs, alloc, w, per_resource, grid, radio, n_bins)
                    eligible[a] += pairs.eligible_per_period
                    blocked[a] += int(np.sum(~alloc.assigned))
                    opportunities[a] += alloc.n
    return received, eligible, blocked, opportunities


def run_experiment(
    cfg: SimConfig,
    scenario_source,
    grid: ResourceGrid,
    radio: RadioConfig,
    crr_cfg: CrrConfig | None = None,
    mode4_cfg: Mode4Config | None = None,
) -> PrpStats:
    """Aggregate replications into reception statistics.

    ``scenario_source`` is a :class:`ScenarioConfig` (fresh Poisson drop
    per replication) or a sequence of Scenario snapshots (consecutive
    windows per replication).  Identical configs give bit-identical
    statistics regardless of ``workers``.
    """
    if isinstance(scenario_source, ScenarioConfig):
        if scenario_source.mean_vehicles < 4 * grid.r_total:
            raise ConfigurationError(
                "expected vehicle count must be at least 4x the resource count "
                f"({scenario_source.mean_vehicles:.0f} < {4 * grid.r_total})"
            )
    master = np.random.SeedSequence(cfg.seed)
    drop_seeds = master.spawn(cfg.drops)
    jobs = [
        (
            drop_seeds[k],
            scenario_source,
            k,
            grid,
            radio,
            cfg,
            crr_cfg,
            mode4_cfg,
        )
        for k in range(cfg.drops)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_one_replication, jobs))
    else:
        results = [_run_one_replication(job) for job in jobs]

    edges = np.asarray(cfg.bin_edges, dtype=float)
    n_bins = edges.size - 1
    n_algo = len(cfg.algorithms)
    received = np.zeros((n_algo, cfg.drops, n_bins), dtype=np.int64)
    eligible = np.zeros_like(received)
    blocked = np.zeros((n_algo, cfg.drops), dtype=np.int64)
    opportunities = np.zeros_like(blocked)
    for k, (r, e, b, o) in enumerate(results):
        received[:, k, :] = r
        eligible[:, k, :] = e
        blocked[:, k] = b
        opportunities[:, k] = o
    return PrpStats(
        bin_edges=edges,
        algorithms=tuple(cfg.algorithms),
        received=received,
        eligible=eligible,
        blocked=blocked,
        opportunities=opportunities,
    )


@dataclass(frozen=True)
class EmpiricalCdf:
    """Empirical CDF sampled on a log-spaced grid."""

    y: np.ndarray
    cdf: np.ndarray

    def evaluate(self, y) -> np.ndarray:
        return np.interp(np.asarray(y, dtype=float), self.y, self.cdf, left=0.0, right=1.0)


def _ecdf_on_log_grid(samples: np.ndarray, n_points: int = 100) -> EmpiricalCdf:
    s = np.sort(samples)
    lo, hi = np.quantile(s, [1e-3, 1.0 - 1e-3])
    if not hi > lo > 0:
        return EmpiricalCdf(y=np.array([max(lo, 0.0)]), cdf=np.array([1.0]))
    grid = np.logspace(math.log10(lo), math.log10(hi), n_points)
    cdf = np.searchsorted(s, grid, side="right") / s.size
    return EmpiricalCdf(y=grid, cdf=cdf)


def interference_oracle(
    kind: str,
    radio: RadioConfig,
    rho: float,
    grid: ResourceGrid,
    rng: np.random.Generator,
    d_sd: float | None = None,
    samples: int = 100_000,
    window_m: float | None = None,
) -> EmpiricalCdf:
    """Direct Monte Carlo law of total interference, for validating analysis.

    ``kind='rr'`` samples thinned-Poisson co-resource interferer sets on
    a window around the receiver and sums their powers (no shadowing, as
    in the analysis).  ``kind='md-two-nearest'`` draws the co-resource
    neighbor distances and sums the two interferers nearest the receiver.
    """
    p0 = pr0(radio)
    beta = radio.beta
    if rho <= 0:
        return EmpiricalCdf(y=np.array([0.0]), cdf=np.array([1.0]))
    if kind == "rr":
        rho_rr = rho / grid.r_total
        window = window_m if window_m is not None else max(2.0e4, 20.0 * grid.r_total / rho)
        counts = rng.poisson(2.0 * rho_rr * window, size=samples)
        total = int(counts.sum())
        dists = rng.uniform(0.0, window, size=total)
        powers = p0 * dists**-beta
        owner = np.repeat(np.arange(samples), counts)
        sums = np.bincount(owner, weights=powers, minlength=samples)
        return _ecdf_on_log_grid(sums)
    if kind == "md-two-nearest":
        if d_sd is None or d_sd <= 0:
            raise ConfigurationError("md oracle needs a positive d_sd")
        r = grid.r_total
        left = rng.gamma(r, 1.0 / rho, size=samples)
        right1 = rng.gamma(r, 1.0 / rho, size=samples)
        right2 = right1 + rng.gamma(r, 1.0 / rho, size=samples)
        right3 = right2 + rng.gamma(r, 1.0 / rho, size=samples)
        # co-resource neighbor coordinates relative to the source; the
        # receiver sits at +d_sd, interference comes from the nearest
        # neighbor on each side of it
        coords = np.stack([-left, right1, right2, right3], axis=1)
        rel = coords - d_sd
        left_gap = np.where(rel < 0, -rel, np.inf).min(axis=1)
        right_gap = np.where(rel > 0, rel, np.inf).min(axis=1)
        sums = p0 * left_gap**-beta + p0 * right_gap**-beta
        return _ecdf_on_log_grid(sums)
    raise ConfigurationError(f"unknown oracle kind {kind!r}")
