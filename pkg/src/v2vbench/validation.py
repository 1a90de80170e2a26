"""Self-contained consistency checks runnable from the command line.

Each check exercises one analytical routine against an independent route
(closed form, Monte Carlo, exhaustive search, or combinatorics) and
returns a pass/fail verdict with a one-line detail.  The full pytest
suite covers more ground; these are the fast, deployable subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy import stats as sps

from . import analysis
from .allocators import allocate_md, allocate_rr
from .radio import RadioConfig, pr0
from .resources import ResourceGrid, freq_slot, time_slot
from .scenario import ScenarioConfig, generate_ppp
from .simulator import interference_oracle

__all__ = ["CheckResult", "run_all_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_levy_closed_form(radio: RadioConfig, grid: ResourceGrid, rho: float) -> CheckResult:
    radio2 = RadioConfig(
        pt_dbm=radio.pt_dbm, gt_db=radio.gt_db, gr_db=radio.gr_db, l0_db=radio.l0_db,
        beta=2.0, noise_power_dbm=radio.noise_power_dbm, gamma_min_db=radio.gamma_min_db,
        shadow_sigma_db=radio.shadow_sigma_db, decorr_distance_m=radio.decorr_distance_m,
    )
    params = analysis.rr_stable_params(rho, grid, radio2)
    ys = np.logspace(-3, 4, 100) * params.scale
    ref = analysis.levy_cdf_rr(rho / grid.r_total, pr0(radio2), ys)
    got = analysis.stable_cdf(params, ys)
    sup = float(np.max(np.abs(got - ref)))
    return CheckResult("stable-cdf-closed-form", sup <= 1e-6, f"sup distance {sup:.2e} (allowed 1e-6)")


def _check_rr_oracle(radio: RadioConfig, grid: ResourceGrid, rho: float, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    emp = interference_oracle("rr", radio, rho, grid, rng, samples=100_000)
    params = analysis.rr_stable_params(rho, grid, radio)
    sup = float(np.max(np.abs(emp.cdf - analysis.stable_cdf(params, emp.y))))
    return CheckResult("stable-cdf-vs-oracle", sup <= 0.01, f"sup distance {sup:.4f} (allowed 0.01)")


def _check_md_oracle(radio: RadioConfig, grid: ResourceGrid, rho: float, d_sd: float, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    emp = interference_oracle("md-two-nearest", radio, rho, grid, rng, d_sd=d_sd, samples=100_000)
    params = analysis.MdParams(rho=rho, r_total=grid.r_total, beta=radio.beta, pr0=pr0(radio), d_sd=d_sd)
    sup = float(np.max(np.abs(emp.cdf - analysis.md_interference_cdf(params, emp.y, mode="full"))))
    return CheckResult("md-cdf-vs-oracle", sup <= 0.01, f"sup distance {sup:.4f} (allowed 0.01)")


def _check_md_modes(radio: RadioConfig, grid: ResourceGrid, rho: float, d_sd: float) -> CheckResult:
    diffs = []
    for d in (0.5 * d_sd, d_sd, 2.0 * d_sd):
        a = analysis.prp("md", radio, rho, grid, d, md_mode="approximate")
        f = analysis.prp("md", radio, rho, grid, d, md_mode="full")
        diffs.append(abs(a - f))
    worst = max(diffs)
    return CheckResult("md-approx-vs-full", worst <= 1e-3, f"max reception-probability difference {worst:.2e} (allowed 1e-3)")


def _check_md_optimality(grid_sizes=(2, 3), instances: int = 20, seed: int = 0) -> CheckResult:
    from .scenario import Scenario

    rng = np.random.default_rng(seed)
    worst_excess = 0.0
    for _ in range(instances):
        r = int(rng.choice(grid_sizes))
        n = int(rng.integers(r + 1, 9))
        road = 1000.0
        pos = np.sort(rng.uniform(0.0, road, n))
        grid = ResourceGrid(r, r, 1)
        scen = Scenario(positions=pos, road_length=road, wrap=False)
        md_assignment = allocate_md(scen, grid).resources
        best = _best_average_same_resource_distance(pos, r)
        md_val = _average_same_resource_distance(pos, md_assignment, r)
        worst_excess = max(worst_excess, best - md_val)
    return CheckResult(
        "md-optimality-exhaustive", worst_excess <= 1e-9,
        f"max excess over cyclic assignment {worst_excess:.2e} (allowed 0)",
    )


def _average_same_resource_distance(pos: np.ndarray, assignment: np.ndarray, r: int) -> float:
    """Mean distance between consecutive users of the same resource.

    This is the quantity the cyclic assignment maximizes; averaging over
    all co-resource pairs instead admits degenerate winners that dump
    every reuse onto one resource spanning the road ends.
    """
    total = 0.0
    count = 0
    for res in range(1, r + 1):
        users = np.sort(pos[np.asarray(assignment) == res])
        if users.size >= 2:
            gaps = np.diff(users)
            total += float(gaps.sum())
            count += gaps.size
    return total / count if count else 0.0


def _best_average_same_resource_distance(pos: np.ndarray, r: int) -> float:
    best = -np.inf
    for combo in product(range(1, r + 1), repeat=pos.size):
        val = _average_same_resource_distance(pos, np.asarray(combo), r)
        if val > best:
            best = val
    return best


def _check_hd_rr(grid: ResourceGrid, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    n = 2000
    trials = 60
    same = 0
    total = 0
    for _ in range(trials):
        alloc = allocate_rr(n, grid, rng)
        r = alloc.resources
        a, b = r[: n // 2], r[n // 2 :]
        same += int(np.sum((np.abs(a - b) % grid.r_time) == 0))
        total += a.size
    p = 1.0 / grid.r_time
    sigma = np.sqrt(p * (1 - p) / total)
    dev = abs(same / total - p)
    return CheckResult("half-duplex-rr", dev <= 3 * sigma + 1e-12, f"|freq - 1/r_time| = {dev:.5f} (3 sigma {3*sigma:.5f})")


def _check_neighbor_normalization() -> CheckResult:
    from scipy.integrate import quad

    worst = 0.0
    rho = 0.1
    for n in (1, 5, 100):
        hi = (n + 30.0 * np.sqrt(n)) / rho  # gamma bulk plus a wide margin
        val, _ = quad(lambda x: analysis.nth_neighbor_pdf(n, rho, x), 0, hi, limit=200)
        worst = max(worst, abs(val - 1.0))
    return CheckResult("neighbor-pdf-normalization", worst <= 1e-9, f"max |integral - 1| = {worst:.1e}")


def _check_neighbor_ks(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 1.0
    for n in (1, 5, 100):
        need = 1500 * n + 1
        cfg = ScenarioConfig(density=0.1, road_length=need / 0.1, wrap=False, seed=int(rng.integers(2**63)))
        s = generate_ppp(cfg)
        pos = s.positions
        samples = pos[n::n] - pos[:-n:n][: pos[n::n].size]
        p = sps.kstest(samples, sps.gamma(a=n, scale=1 / 0.1).cdf).pvalue
        worst = min(worst, p)
    return CheckResult("nth-neighbor-ks", worst >= 0.01, f"min KS p-value {worst:.3f} (level 0.01)")


def _check_grid_roundtrip(grid: ResourceGrid) -> CheckResult:
    r = np.arange(1, grid.r_total + 1)
    ok = bool(np.all((freq_slot(grid, r) - 1) * grid.r_time + time_slot(grid, r) == r))
    return CheckResult("resource-index-roundtrip", ok, "inverse identity holds" if ok else "roundtrip broken")


def run_all_checks(radio: RadioConfig, grid: ResourceGrid, rho: float, d_sd: float, seed: int = 0) -> list[CheckResult]:
    return [
        _check_grid_roundtrip(grid),
        _check_levy_closed_form(radio, grid, rho),
        _check_rr_oracle(radio, grid, rho, seed),
        _check_md_oracle(radio, grid, rho, d_sd, seed + 1),
        _check_md_modes(radio, grid, rho, d_sd),
        _check_md_optimality(seed=seed + 2),
        _check_hd_rr(grid, seed + 3),
        _check_neighbor_normalization(),
        _check_neighbor_ks(seed + 4),
    ]
