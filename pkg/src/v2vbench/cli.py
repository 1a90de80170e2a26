"""Experiment runner: reproduces the benchmark studies as CSV artifacts.

Experiments sweep distance, vehicle density, or beacon-resource count and
emit one CSV per run (columns ``x,algorithm,source,value,ci_low,ci_high``)
plus a manifest with the fully resolved configuration and seeds, and a
small matplotlib script that renders the CSV.  ``validate`` runs the
built-in consistency checks instead.

Exit codes: 0 success, 1 usage or configuration error, 2 numeric failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, analysis
from .allocators import CrrConfig, Mode4Config
from .errors import ConfigurationError, NumericError, TraceFormatError
from .radio import RadioConfig
from .resources import CamConfig, grid_from_cam
from .scenario import ScenarioConfig, TraceFormat, empirical_density, load_trace
from .simulator import PrpStats, SimConfig, run_experiment
from .validation import run_all_checks

EXPERIMENTS = ("prp-vs-distance", "prp-vs-density", "d09-vs-density", "prp-vs-R", "validate")

DEFAULT_CONFIG = """\
# Default configuration: 10 Hz beaconing on a 10 MHz channel, highway
# densities around 0.1 vehicles per meter.

[radio]
# transmit power, dBm
pt_dbm = 23.0
# antenna gains, dB
gt_db = 3.0
gr_db = 3.0
# path loss at 1 m, dB, and path-loss exponent
l0_db = 20.06
beta = 4.0
# receiver noise power, dBm: -174 + 10*log10(bandwidth) + noise figure.
# 9 dB noise figure over the 6.12 MHz a 68-RB beacon occupies gives
# -97.13; use -95.0 to account for the full 10 MHz channel instead.
noise_power_dbm = -97.13
# minimum SINR for correct decoding, dB
gamma_min_db = 2.8
# log-normal shadowing: standard deviation (dB) and decorrelation distance (m)
shadow_sigma_db = 3.0
decorr_distance_m = 25.0
# optional near-field bend of the path-loss law (simulation only)
dual_slope = false
dual_slope_break_m = 20.0
dual_slope_near_exponent = 2.27

[cam]
# beacon cadence and size
beacon_frequency_hz = 10
beacon_size_bytes = 300
# resource blocks one beacon occupies, and RB pairs usable per subframe
rbs_per_cam = 68
rb_pairs_per_subframe = 40

[scenario]
# vehicles per meter and road length (m); the road is a ring
density_per_m = 0.1
road_length_m = 16000.0
wrap = true

[sim]
drops = 200
beacon_periods_per_drop = 3
bin_width_m = 25.0
max_eval_distance_m = 600.0
seed = 1
# exclude pairs this close to the ring seam from statistics (0 disables)
seam_guard_m = 2000.0
workers = 1

[mode4]
# autonomous reselection: interference threshold (absolute power, dBm),
# sensing window, fraction of least-interfered candidates drawn from
i_th_dbm = -110.0
sensing_window_s = 1.0
selection_fraction = 0.2
counter_min_s = 0.5
counter_max_s = 1.5

[crr]
# centralized reuse-distance allocation: minimum spacing between
# co-resource users and the position-report error (Gaussian sigma, m)
reuse_distance_m = 200.0
position_error_sigma_m = 51.02

[experiment]
distance_min_m = 25.0
distance_max_m = 600.0
distance_step_m = 25.0
density_min = 0.025
density_max = 0.3
density_step = 0.025
cam_frequencies_hz = 1,2,3,4,5,6,7,8,9,10
prp_vs_density_d_m = 100.0
prp_vs_r_d_m = 300.0
"""


@dataclass
class ExperimentSpec:
    """A fully resolved experiment: what to run, with which sweeps, where."""

    experiment: str
    radio: RadioConfig
    cam: CamConfig
    scenario: ScenarioConfig
    sim: SimConfig
    crr: CrrConfig
    mode4: Mode4Config
    algorithms: tuple[str, ...]
    md_mode: str
    out_dir: Path
    trace_path: Path | None
    distances: np.ndarray = field(default_factory=lambda: np.array([]))
    densities: np.ndarray = field(default_factory=lambda: np.array([]))
    cam_frequencies: tuple[float, ...] = ()
    prp_vs_density_d_m: float = 100.0
    prp_vs_r_d_m: float = 300.0

    def validate(self) -> None:
        sweeps = {
            "prp-vs-distance": self.distances,
            "prp-vs-density": self.densities,
            "d09-vs-density": self.densities,
            "prp-vs-R": self.cam_frequencies,
        }
        if self.experiment in sweeps and len(sweeps[self.experiment]) == 0:
            raise ConfigurationError(f"empty sweep list for {self.experiment}")


def _get(cfg: configparser.ConfigParser, section: str, key: str, conv, default):
    if not cfg.has_option(section, key):
        return default
    raw = cfg.get(section, key)
    try:
        if conv is bool:
            return cfg.getboolean(section, key)
        return conv(raw)
    except ValueError as exc:
        raise ConfigurationError(f"[{section}] {key} = {raw!r}: {exc}") from None


def load_spec(args: argparse.Namespace) -> ExperimentSpec:
    cfg = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cfg.read_string(DEFAULT_CONFIG)
    if args.config is not None:
        user = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        read = user.read(args.config)
        if not read:
            raise ConfigurationError(f"config file not found: {args.config}")
        for section in user.sections():
            if not cfg.has_section(section):
                raise ConfigurationError(f"unknown config section [{section}]")
            for key, value in user.items(section):
                if not cfg.has_option(section, key):
                    raise ConfigurationError(f"unknown config key [{section}] {key}")
                cfg.set(section, key, value)

    from .radio import DualSlope

    dual = None
    if _get(cfg, "radio", "dual_slope", bool, False):
        dual = DualSlope(
            break_distance_m=_get(cfg, "radio", "dual_slope_break_m", float, 20.0),
            near_exponent=_get(cfg, "radio", "dual_slope_near_exponent", float, 2.27),
        )
    radio = RadioConfig(
        pt_dbm=_get(cfg, "radio", "pt_dbm", float, 23.0),
        gt_db=_get(cfg, "radio", "gt_db", float, 3.0),
        gr_db=_get(cfg, "radio", "gr_db", float, 3.0),
        l0_db=_get(cfg, "radio", "l0_db", float, 20.06),
        beta=_get(cfg, "radio", "beta", float, 4.0),
        noise_power_dbm=_get(cfg, "radio", "noise_power_dbm", float, -97.13),
        gamma_min_db=_get(cfg, "radio", "gamma_min_db", float, 2.8),
        shadow_sigma_db=_get(cfg, "radio", "shadow_sigma_db", float, 3.0),
        decorr_distance_m=_get(cfg, "radio", "decorr_distance_m", float, 25.0),
        dual_slope=dual,
    )
    cam = CamConfig(
        beacon_frequency_hz=_get(cfg, "cam", "beacon_frequency_hz", float, 10.0),
        beacon_size_bytes=_get(cfg, "cam", "beacon_size_bytes", int, 300),
        rbs_per_cam=_get(cfg, "cam", "rbs_per_cam", int, 68),
        rb_pairs_per_subframe=_get(cfg, "cam", "rb_pairs_per_subframe", int, 40),
    )
    scenario = ScenarioConfig(
        density=_get(cfg, "scenario", "density_per_m", float, 0.1),
        road_length=_get(cfg, "scenario", "road_length_m", float, 16000.0),
        wrap=_get(cfg, "scenario", "wrap", bool, True),
        seed=0,
    )
    bin_width = _get(cfg, "sim", "bin_width_m", float, 25.0)
    max_eval = _get(cfg, "sim", "max_eval_distance_m", float, 600.0)
    d_lo = _get(cfg, "experiment", "distance_min_m", float, 25.0)
    d_hi = _get(cfg, "experiment", "distance_max_m", float, 600.0)
    d_step = _get(cfg, "experiment", "distance_step_m", float, 25.0)
    sim = SimConfig(
        drops=args.drops if args.drops is not None else _get(cfg, "sim", "drops", int, 200),
        beacon_periods_per_drop=_get(cfg, "sim", "beacon_periods_per_drop", int, 3),
        bin_edges=tuple(np.arange(d_lo, d_hi + bin_width, bin_width)),
        algorithms=tuple(args.algorithms.split(",")) if args.algorithms else ("rr", "md"),
        max_eval_distance_m=max_eval,
        seed=args.seed if args.seed is not None else _get(cfg, "sim", "seed", int, 1),
        use_dual_slope=dual is not None,
        seam_guard_m=_get(cfg, "sim", "seam_guard_m", float, 2000.0),
        workers=_get(cfg, "sim", "workers", int, 1),
    )
    mode4 = Mode4Config(
        beacon_period_s=cam.beacon_period_s,
        i_th_dbm=_get(cfg, "mode4", "i_th_dbm", float, -110.0),
        sensing_window_s=_get(cfg, "mode4", "sensing_window_s", float, 1.0),
        selection_fraction=_get(cfg, "mode4", "selection_fraction", float, 0.2),
        counter_min_s=_get(cfg, "mode4", "counter_min_s", float, 0.5),
        counter_max_s=_get(cfg, "mode4", "counter_max_s", float, 1.5),
    )
    crr = CrrConfig(
        reuse_distance_m=_get(cfg, "crr", "reuse_distance_m", float, 200.0),
        position_error_sigma_m=_get(cfg, "crr", "position_error_sigma_m", float, 51.02),
    )
    dens = np.arange(
        _get(cfg, "experiment", "density_min", float, 0.025),
        _get(cfg, "experiment", "density_max", float, 0.3) + 1e-12,
        _get(cfg, "experiment", "density_step", float, 0.025),
    )
    freqs = tuple(
        float(x) for x in _get(cfg, "experiment", "cam_frequencies_hz", str, "1").split(",")
    )
    spec = ExperimentSpec(
        experiment=args.experiment,
        radio=radio,
        cam=cam,
        scenario=scenario,
        sim=sim,
        crr=crr,
        mode4=mode4,
        algorithms=sim.algorithms,
        md_mode="approximate" if args.mode == "approx" else "full",
        out_dir=Path(args.out),
        trace_path=Path(args.trace) if args.trace else None,
        distances=np.arange(d_lo, d_hi + 0.5 * d_step, d_step),
        densities=dens,
        cam_frequencies=freqs,
        prp_vs_density_d_m=_get(cfg, "experiment", "prp_vs_density_d_m", float, 100.0),
        prp_vs_r_d_m=_get(cfg, "experiment", "prp_vs_r_d_m", float, 300.0),
    )
    spec.validate()
    spec._resolved = {s: dict(cfg.items(s)) for s in cfg.sections()}  # for the manifest
    return spec


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _write_csv(path: Path, rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,algorithm,source,value,ci_low,ci_high\n")
        for x, algo, source, value, lo, hi in rows:
            fh.write(f"{_fmt(x)},{algo},{source},{_fmt(value)},{_fmt(lo)},{_fmt(hi)}\n")


def _write_manifest(spec: ExperimentSpec, path: Path, extra: dict) -> None:
    manifest = {
        "version": __version__,
        "experiment": spec.experiment,
        "seed": spec.sim.seed,
        "algorithms": list(spec.algorithms),
        "md_mode": spec.md_mode,
        "config": getattr(spec, "_resolved", {}),
    }
    manifest.update(extra)
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


_PLOT_TEMPLATE = """\
#!/usr/bin/env python3
\"\"\"Render {csv_name} (written alongside this script).\"\"\"
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt

rows = list(csv.DictReader(open(Path(__file__).with_name("{csv_name}"))))
series = defaultdict(list)
for r in rows:
    key = (r["algorithm"], r["source"])
    series[key].append((float(r["x"]), float(r["value"]),
                        float(r["ci_low"]), float(r["ci_high"])))
fig, ax = plt.subplots(figsize=(7, 4.5))
for (algo, source), pts in sorted(series.items()):
    pts.sort()
    xs = [p[0] for p in pts]; ys = [p[1] for p in pts]
    if source == "analysis":
        ax.plot(xs, ys, "-", label=f"{{algo}} (analysis)")
    else:
        lo = [p[1] - p[2] for p in pts]; hi = [p[3] - p[1] for p in pts]
        ax.errorbar(xs, ys, yerr=[lo, hi], fmt="o--", ms=3, capsize=2,
                    label=f"{{algo}} (simulation)")
ax.set_xlabel("{xlabel}")
ax.set_ylabel("{ylabel}")
ax.grid(alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(Path(__file__).with_name("{png_name}"), dpi=150)
print("wrote", Path(__file__).with_name("{png_name}"))
"""


def _emit_plot_script(spec: ExperimentSpec, xlabel: str, ylabel: str) -> None:
    csv_name = f"{spec.experiment}.csv"
    script = _PLOT_TEMPLATE.format(
        csv_name=csv_name,
        xlabel=xlabel,
        ylabel=ylabel,
        png_name=f"{spec.experiment}.png",
    )
    (spec.out_dir / f"plot_{spec.experiment.replace('-', '_')}.py").write_text(script)


def _load_trace_snapshots(spec: ExperimentSpec):
    data = spec.trace_path.read_bytes()
    fmt = TraceFormat(road_length=None, wrap=False)
    snapshots = load_trace(data, fmt)
    if not snapshots:
        raise ConfigurationError(f"trace {spec.trace_path} holds no snapshots")
    return snapshots


def _sim_stats(spec: ExperimentSpec, scenario_source, sim: SimConfig | None = None) -> PrpStats:
    return run_experiment(
        sim or spec.sim, scenario_source, grid_from_cam(spec.cam), spec.radio,
        crr_cfg=spec.crr, mode4_cfg=spec.mode4,
    )


def _run_prp_vs_distance(spec: ExperimentSpec) -> list[tuple]:
    grid = grid_from_cam(spec.cam)
    rows = []
    if spec.trace_path is not None:
        snapshots = _load_trace_snapshots(spec)
        rho = float(np.mean([empirical_density(s) for s in snapshots]))
        source = snapshots
    else:
        rho = spec.scenario.density
        source = spec.scenario
    for algo in ("rr", "md"):
        curve = analysis.prp_curve(algo, spec.radio, rho, grid, spec.distances, md_mode=spec.md_mode)
        rows += [(d, algo, "analysis", v, v, v) for d, v in zip(curve.distances_m, curve.values)]
    stats = _sim_stats(spec, source)
    for algo in spec.algorithms:
        mean = stats.mean(algo)
        ci = stats.ci_halfwidth(algo)
        for x, v, c in zip(stats.bin_centers, mean, ci):
            if np.isnan(v):
                continue
            c = 0.0 if np.isnan(c) else c
            rows.append((x, algo, "simulation", v, v - c, v + c))
    return rows


def _scenario_for_density(spec: ExperimentSpec, rho: float) -> ScenarioConfig:
    return ScenarioConfig(
        density=rho,
        road_length=spec.scenario.road_length,
        wrap=spec.scenario.wrap,
        seed=0,
    )


def _run_prp_vs_density(spec: ExperimentSpec) -> list[tuple]:
    grid = grid_from_cam(spec.cam)
    d_eval = spec.prp_vs_density_d_m
    edges = np.asarray(spec.sim.bin_edges)
    bin_of_d = int(np.digitize(d_eval, edges) - 1)
    rows = []
    for rho in spec.densities:
        for algo in ("rr", "md"):
            v = analysis.prp(algo, spec.radio, rho, grid, d_eval, md_mode=spec.md_mode)
            rows.append((rho, algo, "analysis", v, v, v))
        stats = _sim_stats(spec, _scenario_for_density(spec, rho))
        for algo in spec.algorithms:
            v = stats.mean(algo)[bin_of_d]
            c = stats.ci_halfwidth(algo)[bin_of_d]
            if np.isnan(v):
                continue
            c = 0.0 if np.isnan(c) else c
            rows.append((rho, algo, "simulation", v, v - c, v + c))
    return rows


def _run_d09_vs_density(spec: ExperimentSpec) -> list[tuple]:
    grid = grid_from_cam(spec.cam)
    rows = []
    for rho in spec.densities:
        for algo in ("rr", "md"):
            v = analysis.d09(algo, spec.radio, rho, grid, md_mode=spec.md_mode)
            rows.append((rho, algo, "analysis", v, v, v))
        stats = _sim_stats(spec, _scenario_for_density(spec, rho))
        for algo in spec.algorithms:
            curve = analysis.PrpCurve(
                distances_m=stats.bin_centers,
                values=np.nan_to_num(stats.mean(algo), nan=0.0).clip(0.0, 1.0),
            )
            v = analysis.d09_from_curve(curve)
            rows.append((rho, algo, "simulation", v, v, v))
    return rows


def _run_prp_vs_r(spec: ExperimentSpec) -> list[tuple]:
    d_eval = spec.prp_vs_r_d_m
    rows = []
    for f_cam in spec.cam_frequencies:
        cam = CamConfig(
            beacon_frequency_hz=f_cam,
            beacon_size_bytes=spec.cam.beacon_size_bytes,
            rbs_per_cam=spec.cam.rbs_per_cam,
            rb_pairs_per_subframe=spec.cam.rb_pairs_per_subframe,
        )
        grid = grid_from_cam(cam)
        for algo in ("rr", "md"):
            v = analysis.prp(algo, spec.radio, spec.scenario.density, grid, d_eval, md_mode=spec.md_mode)
            rows.append((grid.r_total, algo, "analysis", v, v, v))
        edges = np.asarray(spec.sim.bin_edges)
        bin_of_d = int(np.digitize(d_eval, edges) - 1)
        road = max(spec.scenario.road_length, 4.0 * grid.r_total / spec.scenario.density / 0.9)
        scen = ScenarioConfig(
            density=spec.scenario.density, road_length=road, wrap=spec.scenario.wrap, seed=0
        )
        mode4 = Mode4Config(
            beacon_period_s=cam.beacon_period_s,
            i_th_dbm=spec.mode4.i_th_dbm,
            sensing_window_s=spec.mode4.sensing_window_s,
            selection_fraction=spec.mode4.selection_fraction,
            counter_min_s=spec.mode4.counter_min_s,
            counter_max_s=spec.mode4.counter_max_s,
        )
        stats = run_experiment(
            spec.sim, scen, grid, spec.radio, crr_cfg=spec.crr, mode4_cfg=mode4
        )
        for algo in spec.algorithms:
            v = stats.mean(algo)[bin_of_d]
            c = stats.ci_halfwidth(algo)[bin_of_d]
            if np.isnan(v):
                continue
            c = 0.0 if np.isnan(c) else c
            rows.append((grid.r_total, algo, "simulation", v, v - c, v + c))
    return rows


def _run_validate(spec: ExperimentSpec) -> int:
    grid = grid_from_cam(spec.cam)
    results = run_all_checks(spec.radio, grid, spec.scenario.density, 120.0, seed=spec.sim.seed)
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name:<{width}}  {r.detail}")
        failures += 0 if r.passed else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 0 if failures == 0 else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="v2vbench",
        description="Reception-probability benchmarks for V2V resource allocation",
    )
    parser.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    parser.add_argument("--config", default=None, help="INI config; defaults used when omitted")
    parser.add_argument("--trace", default=None, help="position trace CSV (prp-vs-distance)")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--drops", type=int, default=None, help="override replication count")
    parser.add_argument("--algorithms", default=None, help="comma list: rr,md,crr,lgc,m4:0,m4:0.8")
    parser.add_argument("--mode", choices=("approx", "full"), default="approx",
                        help="interference-CDF evaluation mode for the max-reuse benchmark")
    parser.add_argument("--dump-config", action="store_true", help="print the default config and exit")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.dump_config:
        print(DEFAULT_CONFIG, end="")
        return 0
    try:
        spec = load_spec(args)
    except (ConfigurationError, TraceFormatError, configparser.Error) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

    if spec.experiment == "validate":
        return _run_validate(spec)

    runners = {
        "prp-vs-distance": (_run_prp_vs_distance, "source-destination distance (m)", "packet reception probability"),
        "prp-vs-density": (_run_prp_vs_density, "vehicle density (1/m)", "packet reception probability"),
        "d09-vs-density": (_run_d09_vs_density, "vehicle density (1/m)", "max distance with reception probability > 0.9 (m)"),
        "prp-vs-R": (_run_prp_vs_r, "beacon resources per period", "packet reception probability"),
    }
    runner, xlabel, ylabel = runners[spec.experiment]
    try:
        spec.out_dir.mkdir(parents=True, exist_ok=True)
        rows = runner(spec)
        csv_path = spec.out_dir / f"{spec.experiment}.csv"
        _write_csv(csv_path, rows)
        _write_manifest(spec, spec.out_dir / "manifest.json", {"rows": len(rows)})
        _emit_plot_script(spec, xlabel, ylabel)
    except (ConfigurationError, TraceFormatError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {csv_path}")
    return 0


def console_main() -> None:
    raise SystemExit(main())
