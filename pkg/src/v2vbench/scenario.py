"""1-D highway scenarios: Poisson vehicle drops and trace ingestion.

Vehicles live on a single road axis.  A scenario is just the ordered
sequence of vehicle coordinates plus the road length; with ``wrap=True``
the road is a ring and distances are taken the short way around, which
removes edge effects when validating against an infinite-line analysis.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, TraceFormatError

__all__ = [
    "ScenarioConfig",
    "Scenario",
    "TraceFormat",
    "generate_ppp",
    "load_trace",
    "empirical_density",
]


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of a homogeneous Poisson vehicle drop.

    ``density`` is in vehicles per meter, ``road_length`` in meters.  The
    expected vehicle count is ``density * road_length``; experiments that
    combine a scenario with a resource grid should keep it at or above
    four times the grid size so that ring-wrap seams stay rare (that
    cross-check lives in the simulator, which sees both objects).
    """

    density: float
    road_length: float
    wrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.density) and self.density > 0):
            raise ConfigurationError(f"density must be finite and > 0, got {self.density}")
        if not (math.isfinite(self.road_length) and self.road_length > 0):
            raise ConfigurationError(
                f"road_length must be finite and > 0, got {self.road_length}"
            )

    @property
    def mean_vehicles(self) -> float:
        return self.density * self.road_length


@dataclass(frozen=True)
class Scenario:
    """An ordered snapshot of vehicle positions on one road.

    ``positions`` is nondecreasing and contained in ``[0, road_length)``.
    ``ids`` is optional and aligned with ``positions``; trace playback uses
    it to carry per-vehicle state between snapshots.
    """

    positions: np.ndarray
    road_length: float
    wrap: bool = True
    ids: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "positions", pos)
        if pos.ndim != 1:
            raise ConfigurationError("positions must be one-dimensional")
        if pos.size and (np.any(~np.isfinite(pos)) or pos.min() < 0 or pos.max() >= self.road_length):
            raise ConfigurationError("positions must lie in [0, road_length)")
        if pos.size > 1 and np.any(np.diff(pos) < 0):
            raise ConfigurationError("positions must be sorted nondecreasing")
        if self.ids is not None:
            ids = np.asarray(self.ids)
            object.__setattr__(self, "ids", ids)
            if ids.shape != pos.shape:
                raise ConfigurationError("ids must align with positions")

    @property
    def n(self) -> int:
        return int(self.positions.size)

    def pairwise_distance(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Distance between coordinates ``a`` and ``b`` (ring-aware)."""
        d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
        if self.wrap:
            d = np.minimum(d, self.road_length - d)
        return d


def generate_ppp(cfg: ScenarioConfig) -> Scenario:
    """Draw one homogeneous Poisson snapshot.

    The vehicle count is Poisson with mean ``density * road_length`` and
    positions are i.i.d. uniform, then sorted.  Identical configs (seed
    included) give bit-identical scenarios.
    """
    rng = np.random.default_rng(cfg.seed)
    n = rng.poisson(cfg.mean_vehicles)
    positions = np.sort(rng.uniform(0.0, cfg.road_length, size=n))
    # uniform() draws in [0, L); sorting keeps ties in draw order (stable).
    return Scenario(positions=positions, road_length=cfg.road_length, wrap=cfg.wrap)


@dataclass(frozen=True)
class TraceFormat:
    """How to read a position trace.

    Traces are CSV with header ``time_s,vehicle_id,position_m`` (UTF-8,
    LF or CRLF).  2-D traces must be projected onto the road axis before
    ingestion.  ``road_length`` overrides the inferred length (max
    position, rounded up) so densities from short snapshots stay
    comparable; traces are treated as non-wrapping road segments.
    """

    road_length: float | None = None
    wrap: bool = False


_TRACE_HEADER = ("time_s", "vehicle_id", "position_m")


def load_trace(source: io.IOBase | bytes | str, fmt: TraceFormat = TraceFormat()) -> list[Scenario]:
    """Parse a trace into one Scenario per snapshot time.

    Rows must be grouped by nondecreasing ``time_s``; positions within a
    snapshot are sorted (ids follow their vehicle).  Malformed rows raise
    :class:`TraceFormatError` carrying the 1-based line number.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    lines = text.splitlines()
    if not lines:
        return []

    reader = csv.reader(lines)
    rows = list(reader)
    header = tuple(h.strip() for h in rows[0])
    if header != _TRACE_HEADER:
        raise TraceFormatError(
            f"expected header {','.join(_TRACE_HEADER)!r}, got {','.join(header)!r}", 1
        )

    snapshots: list[tuple[float, list[float], list[int]]] = []
    last_time = -math.inf
    for i, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise TraceFormatError(f"expected 3 fields, got {len(row)}", i)
        try:
            t = float(row[0])
            vid = int(row[1])
            pos = float(row[2])
        except ValueError as exc:
            raise TraceFormatError(f"unparsable record {row!r} ({exc})", i) from None
        if not math.isfinite(t) or not math.isfinite(pos):
            raise TraceFormatError(f"non-finite value in record {row!r}", i)
        if pos < 0:
            raise TraceFormatError(f"negative position {pos}", i)
        if t < last_time:
            raise TraceFormatError(f"timestamps not sorted: {t} after {last_time}", i)
        if t > last_time:
            snapshots.append((t, [], []))
            last_time = t
        snapshots[-1][1].append(pos)
        snapshots[-1][2].append(vid)

    if not snapshots:
        return []

    if fmt.road_length is not None:
        road_length = fmt.road_length
    else:
        max_pos = max(max(p) for _, p, _ in snapshots if p)
        road_length = float(np.nextafter(max_pos, np.inf)) if max_pos > 0 else 1.0
    out = []
    for _, pos_list, id_list in snapshots:
        pos = np.asarray(pos_list, dtype=float)
        ids = np.asarray(id_list, dtype=np.int64)
        order = np.argsort(pos, kind="stable")
        out.append(
            Scenario(positions=pos[order], road_length=road_length, wrap=fmt.wrap, ids=ids[order])
        )
    return out


def empirical_density(s: Scenario) -> float:
    """Vehicles per meter of this snapshot."""
    if s.road_length <= 0:
        raise ConfigurationError("road_length must be > 0")
    return s.n / s.road_length
