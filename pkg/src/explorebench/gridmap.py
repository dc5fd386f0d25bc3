"""Occupancy grids: ground truth and belief, sensing, inflation, coverage.

The simulator keeps two grids with identical geometry: a ground-truth grid
(every cell Free or Occupied) and the robot's belief grid (cells start
Unknown and are filled in by simulated LiDAR reveals). Costs follow the
usual costmap convention: 0..252 decaying inflation, 253 inscribed,
254 lethal, 255 reserved as the unknown marker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

UNKNOWN = 0
FREE = 1
OCCUPIED = 2

COST_INSCRIBED = 253
COST_LETHAL = 254
COST_UNKNOWN = 255  # marker, not a cost; paired with state UNKNOWN

_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


class MapError(Exception):
    """Base class for map loading and geometry errors."""


class MalformedMapError(MapError):
    pass


class ZeroResolutionError(MapError):
    pass


class InvalidRadiiError(MapError):
    pass


class PoseOutOfBoundsError(MapError):
    pass


class PoseInsideObstacleError(MapError):
    pass


class StartUnreachableError(MapError):
    pass


def wrap_angle(theta: float) -> float:
    """Normalize an angle into (-pi, pi]."""
    t = math.fmod(theta + math.pi, 2.0 * math.pi)
    if t <= 0.0:
        t += 2.0 * math.pi
    return t - math.pi


@dataclass
class Pose:
    """Planar robot pose; theta is normalized into (-pi, pi] on construction."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        self.theta = wrap_angle(self.theta)


@dataclass(frozen=True)
class LidarModel:
    """Simulated scanner: beam_count rays spread over angular_span radians."""

    beam_count: int = 360
    max_range: float = 2.5
    angular_span: float = 2.0 * math.pi

    def __post_init__(self):
        if self.beam_count < 1:
            raise ValueError(f"beam_count must be >= 1, got {self.beam_count}")
        if self.max_range <= 0.0:
            raise ValueError(f"max_range must be > 0, got {self.max_range}")


@dataclass(frozen=True)
class InflationParams:
    """Costmap inflation: lethal at obstacles, inscribed band, then exponential decay."""

    inscribed_radius: float = 0.12
    inflation_radius: float = 0.6
    decay_rate: float = 4.0

    def __post_init__(self):
        if not (0.0 < self.inscribed_radius <= self.inflation_radius):
            raise InvalidRadiiError(
                f"need 0 < inscribed_radius <= inflation_radius, got "
                f"{self.inscribed_radius} and {self.inflation_radius}"
            )


@dataclass
class OccupancyGrid:
    """Row-major occupancy grid; flat index k = i + width * j.

    states and costs are (height, width) uint8 arrays indexed [j, i].
    The cost array mirrors states: Unknown cells hold the COST_UNKNOWN
    marker and Occupied cells hold COST_LETHAL. origin is the world
    position of the corner of cell (0, 0); cell (i, j) has its center at
    origin + ((i + 0.5) * resolution, (j + 0.5) * resolution).
    """

    width: int
    height: int
    resolution: float
    states: np.ndarray
    costs: np.ndarray
    origin: tuple[float, float] = (0.0, 0.0)
    inflation: InflationParams = field(default_factory=InflationParams)

    def __post_init__(self):
        if self.resolution <= 0.0:
            raise ZeroResolutionError(f"resolution must be > 0, got {self.resolution}")
        if self.states.shape != (self.height, self.width):
            raise MalformedMapError(
                f"states shape {self.states.shape} != {(self.height, self.width)}"
            )
        if self.costs.shape != self.states.shape:
            raise MalformedMapError("costs shape differs from states shape")

    @classmethod
    def unknown(cls, width, height, resolution, origin=(0.0, 0.0),
                inflation: InflationParams | None = None) -> "OccupancyGrid":
        """All-Unknown belief grid with the matching cost markers."""
        states = np.full((height, width), UNKNOWN, dtype=np.uint8)
        costs = np.full((height, width), COST_UNKNOWN, dtype=np.uint8)
        return cls(width, height, resolution, states, costs, origin,
                   inflation or InflationParams())

    def clone(self) -> "OccupancyGrid":
        return replace(self, states=self.states.copy(), costs=self.costs.copy())

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.width and 0 <= j < self.height

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        """Cell containing the world point (cells are half-open squares)."""
        i = int(math.floor((x - self.origin[0]) / self.resolution))
        j = int(math.floor((y - self.origin[1]) / self.resolution))
        return i, j

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (self.origin[0] + (i + 0.5) * self.resolution,
                self.origin[1] + (j + 0.5) * self.resolution)

    def state_counts(self) -> dict[int, int]:
        return {s: int(np.count_nonzero(self.states == s))
                for s in (UNKNOWN, FREE, OCCUPIED)}


# ---------------------------------------------------------------------------
# Map I/O
#
# ASCII format: header line "W H RES", then H rows of W characters,
# '.' = Free, '#' = Occupied ('?' = Unknown accepted only for beliefs).
# Row 0 of the text is grid row j = 0.
#
# PGM format: binary P5, maxval 255; byte <= occupied_threshold => Occupied.
# Resolution and threshold arrive out of band (sidecar "key = value" text).
# ---------------------------------------------------------------------------

def _parse_ascii(content: str, allow_unknown: bool):
    lines = [ln for ln in content.splitlines() if ln.strip() != ""]
    if not lines:
        raise MalformedMapError("empty map content")
    header = lines[0].split()
    if len(header) != 3:
        raise MalformedMapError(f"header must be 'W H RES', got {lines[0]!r}")
    try:
        width, height = int(header[0]), int(header[1])
        resolution = float(header[2])
    except ValueError as e:
        raise MalformedMapError(f"bad header numbers: {e}") from None
    if width <= 0 or height <= 0:
        raise MalformedMapError(f"bad dimensions {width}x{height}")
    if resolution <= 0.0:
        raise ZeroResolutionError(f"resolution must be > 0, got {resolution}")
    rows = lines[1:]
    if len(rows) != height:
        raise MalformedMapError(f"expected {height} rows, got {len(rows)}")
    states = np.empty((height, width), dtype=np.uint8)
    lut = {".": FREE, "#": OCCUPIED}
    if allow_unknown:
        lut["?"] = UNKNOWN
    for j, row in enumerate(rows):
        if len(row) != width:
            raise MalformedMapError(f"row {j} has {len(row)} chars, expected {width}")
        for i, ch in enumerate(row):
            try:
                states[j, i] = lut[ch]
            except KeyError:
                raise MalformedMapError(f"illegal character {ch!r} at row {j} col {i}") from None
    return width, height, resolution, states


def _parse_pgm(data: bytes, resolution: float, occupied_threshold: int):
    # P5 header: magic, width, height, maxval, separated by whitespace and
    # optional '#' comments, then one binary byte per pixel.
    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise MalformedMapError("truncated PGM header")
        return data[start:pos]

    if next_token() != b"P5":
        raise MalformedMapError("not a binary PGM (P5) file")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError as e:
        raise MalformedMapError(f"bad PGM header: {e}") from None
    if width <= 0 or height <= 0:
        raise MalformedMapError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise MalformedMapError(f"PGM maxval must be 255, got {maxval}")
    if resolution <= 0.0:
        raise ZeroResolutionError(f"resolution must be > 0, got {resolution}")
    pos += 1  # single whitespace after maxval
    pixels = data[pos : pos + width * height]
    if len(pixels) != width * height:
        raise MalformedMapError(
            f"PGM payload has {len(pixels)} bytes, expected {width * height}"
        )
    raw = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)
    states = np.where(raw <= occupied_threshold, OCCUPIED, FREE).astype(np.uint8)
    return width, height, resolution, states


def load_map(source, fmt: str = "ascii", *, resolution: float | None = None,
             occupied_threshold: int = 50,
             inflation: InflationParams | None = None) -> OccupancyGrid:
    """Parse a ground-truth map (no Unknown cells) and inflate its costs.

    fmt="ascii" takes the text content; fmt="pgm" takes the raw bytes plus
    a resolution (from the sidecar) and the occupied byte threshold.
    """
    if fmt == "ascii":
        if isinstance(source, bytes):
            source = source.decode("ascii")
        width, height, res, states = _parse_ascii(source, allow_unknown=False)
    elif fmt == "pgm":
        if resolution is None:
            raise MalformedMapError("pgm maps need an explicit resolution")
        width, height, res, states = _parse_pgm(source, resolution, occupied_threshold)
    else:
        raise MalformedMapError(f"unknown map format {fmt!r}")
    inflation = inflation or InflationParams()
    costs = np.zeros((height, width), dtype=np.uint8)
    grid = OccupancyGrid(width, height, res, states, costs, inflation=inflation)
    inflate(grid, inflation.inscribed_radius, inflation.inflation_radius,
            inflation.decay_rate)
    return grid


def load_belief(content: str, inflation: InflationParams | None = None) -> OccupancyGrid:
    """Parse a belief snapshot in the ASCII format, with '?' for Unknown."""
    width, height, res, states = _parse_ascii(content, allow_unknown=True)
    inflation = inflation or InflationParams()
    costs = np.zeros((height, width), dtype=np.uint8)
    grid = OccupancyGrid(width, height, res, states, costs, inflation=inflation)
    inflate(grid, inflation.inscribed_radius, inflation.inflation_radius,
            inflation.decay_rate)
    return grid


def load_map_file(path, inflation: InflationParams | None = None) -> OccupancyGrid:
    """Load a map file, picking the format from the extension.

    *.pgm expects a sidecar text file '<path>.txt' with 'resolution = <m>'
    and optionally 'occupied_threshold = <byte>' lines.
    """
    path = str(path)
    if path.endswith(".pgm"):
        with open(path, "rb") as f:
            data = f.read()
        meta = {"occupied_threshold": "50"}
        with open(path + ".txt") as f:
            for line in f:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise MalformedMapError(f"bad sidecar line {line!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                meta[key] = value
        if "resolution" not in meta:
            raise MalformedMapError(f"sidecar for {path} lacks 'resolution'")
        return load_map(data, "pgm", resolution=float(meta["resolution"]),
                        occupied_threshold=int(meta["occupied_threshold"]),
                        inflation=inflation)
    with open(path) as f:
        return load_map(f.read(), "ascii", inflation=inflation)


def to_ascii(grid: OccupancyGrid) -> str:
    """Serialize a grid to the ASCII format ('?' for Unknown cells)."""
    chars = np.empty(grid.states.shape, dtype="U1")
    chars[grid.states == UNKNOWN] = "?"
    chars[grid.states == FREE] = "."
    chars[grid.states == OCCUPIED] = "#"
    lines = [f"{grid.width} {grid.height} {grid.resolution}"]
    lines.extend("".join(row) for row in chars)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Costmap inflation and remapping
# ---------------------------------------------------------------------------

def _inflation_costs(states, resolution, inscribed_radius, inflation_radius, decay_rate):
    """Cost array for a state window (Euclidean cell-center distances)."""
    occupied = states == OCCUPIED
    costs = np.zeros(states.shape, dtype=np.uint8)
    if occupied.any():
        dist = ndimage.distance_transform_edt(~occupied) * resolution
        band = (dist > inscribed_radius) & (dist <= inflation_radius)
        decayed = np.floor(
            252.0 * np.exp(-decay_rate * (dist - inscribed_radius)) + 0.5
        )
        costs[band] = decayed[band].astype(np.uint8)
        costs[(dist <= inscribed_radius) & ~occupied] = COST_INSCRIBED
        costs[occupied] = COST_LETHAL
    costs[states == UNKNOWN] = COST_UNKNOWN
    return costs


def inflate(grid: OccupancyGrid, inscribed_radius: float, inflation_radius: float,
            decay_rate: float) -> None:
    """Recompute grid.costs from grid.states.

    Occupied cells get COST_LETHAL, Free cells within inscribed_radius of an
    Occupied cell get COST_INSCRIBED, Free cells at distance d in
    (inscribed_radius, inflation_radius] get round(252 * exp(-decay_rate *
    (d - inscribed_radius))), everything farther is 0. Unknown cells keep
    the COST_UNKNOWN marker. Distances are Euclidean between cell centers.
    """
    if not (0.0 < inscribed_radius <= inflation_radius):
        raise InvalidRadiiError(
            f"need 0 < inscribed_radius <= inflation_radius, got "
            f"{inscribed_radius} and {inflation_radius}"
        )
    grid.inflation = InflationParams(inscribed_radius, inflation_radius, decay_rate)
    grid.costs[...] = _inflation_costs(
        grid.states, grid.resolution, inscribed_radius, inflation_radius, decay_rate
    )


def reinflate_window(grid: OccupancyGrid, i0: int, j0: int, i1: int, j1: int) -> None:
    """Recompute costs for the cell window [i0, i1] x [j0, j1] only.

    Obstacles up to inflation_radius outside the window influence costs
    inside it, so the distance field is evaluated on a window padded twice:
    once for the cells whose costs may have changed, once more for the
    obstacles that can reach those cells.
    """
    p = grid.inflation
    pad = int(math.ceil(p.inflation_radius / grid.resolution)) + 1
    wj0, wj1 = max(0, j0 - pad), min(grid.height - 1, j1 + pad)
    wi0, wi1 = max(0, i0 - pad), min(grid.width - 1, i1 + pad)
    rj0, rj1 = max(0, wj0 - pad), min(grid.height - 1, wj1 + pad)
    ri0, ri1 = max(0, wi0 - pad), min(grid.width - 1, wi1 + pad)
    window = grid.states[rj0 : rj1 + 1, ri0 : ri1 + 1]
    costs = _inflation_costs(window, grid.resolution, p.inscribed_radius,
                             p.inflation_radius, p.decay_rate)
    grid.costs[wj0 : wj1 + 1, wi0 : wi1 + 1] = costs[
        wj0 - rj0 : wj1 - rj0 + 1, wi0 - ri0 : wi1 - ri0 + 1
    ]


def remap_cost(raw_cost) -> float:
    """Map a raw cost (or the unknown marker) into [0, 1].

    Unknown -> 0, lethal (254) -> 1 exactly, anything else (raw + 1) / 255.
    """
    if raw_cost == COST_UNKNOWN:
        return 0.0
    if raw_cost == COST_LETHAL:
        return 1.0
    return (int(raw_cost) + 1) / 255.0


def remap_costs(costs: np.ndarray) -> np.ndarray:
    """Vectorized remap_cost over a cost array."""
    m = (costs.astype(np.float64) + 1.0) / 255.0
    m[costs == COST_LETHAL] = 1.0
    m[costs == COST_UNKNOWN] = 0.0
    return m


# ---------------------------------------------------------------------------
# Simulated LiDAR reveal
# ---------------------------------------------------------------------------

def _traverse_beams(grid, pose, angles, max_range):
    """March every beam through the grid in lockstep (Amanatides-Woo walk).

    Each iteration steps every active beam across exactly one cell boundary,
    choosing the x crossing on ties so that corner hits visit both adjacent
    cells (supercover behavior: diagonal walls block diagonally passing
    rays). A beam stops when it leaves the grid, enters an Occupied cell
    (a hit), or its next boundary crossing lies beyond max_range.

    Returns (visited_i, visited_j, hit_i, hit_j) where visited covers every
    cell any beam entered (including hit cells) and hit_* hold per-beam hit
    cell indices (-1 when the beam ended without a hit).
    """
    n = len(angles)
    res = grid.resolution
    gx = (pose.x - grid.origin[0]) / res
    gy = (pose.y - grid.origin[1]) / res
    dx = np.cos(angles)
    dy = np.sin(angles)
    range_cells = max_range / res

    ci = np.full(n, int(math.floor(gx)), dtype=np.int64)
    cj = np.full(n, int(math.floor(gy)), dtype=np.int64)
    step_i = np.where(dx > 0, 1, np.where(dx < 0, -1, 0))
    step_j = np.where(dy > 0, 1, np.where(dy < 0, -1, 0))

    with np.errstate(divide="ignore", invalid="ignore"):
        inv_dx = np.where(dx != 0.0, 1.0 / dx, np.inf)
        inv_dy = np.where(dy != 0.0, 1.0 / dy, np.inf)
        # Parameter t measured in cells along the ray; next boundary crossings.
        t_max_x = np.where(
            dx > 0, (ci + 1 - gx) * inv_dx, np.where(dx < 0, (ci - gx) * inv_dx, np.inf)
        )
        t_max_y = np.where(
            dy > 0, (cj + 1 - gy) * inv_dy, np.where(dy < 0, (cj - gy) * inv_dy, np.inf)
        )
    t_delta_x = np.abs(inv_dx)
    t_delta_y = np.abs(inv_dy)

    occupied = grid.states == OCCUPIED
    active = np.ones(n, dtype=bool)
    hit_i = np.full(n, -1, dtype=np.int64)
    hit_j = np.full(n, -1, dtype=np.int64)
    # The pose cell itself is always seen.
    visited_i = [ci[:1].copy()]
    visited_j = [cj[:1].copy()]

    while active.any():
        step_x = active & (t_max_x <= t_max_y)
        step_y = active & ~step_x
        entry_t = np.where(step_x, t_max_x, t_max_y)
        ci = ci + np.where(step_x, step_i, 0)
        cj = cj + np.where(step_y, step_j, 0)
        t_max_x = t_max_x + np.where(step_x, t_delta_x, 0.0)
        t_max_y = t_max_y + np.where(step_y, t_delta_y, 0.0)

        out = active & (entry_t > range_cells)
        active &= ~out
        oob = active & ~((ci >= 0) & (ci < grid.width) & (cj >= 0) & (cj < grid.height))
        active &= ~oob
        if not active.any():
            break
        visited_i.append(ci[active].copy())
        visited_j.append(cj[active].copy())
        hits = active.copy()
        hits[active] = occupied[cj[active], ci[active]]
        if hits.any():
            hit_i[hits] = ci[hits]
            hit_j[hits] = cj[hits]
            active &= ~hits

    vi = np.concatenate(visited_i)
    vj = np.concatenate(visited_j)
    return vi, vj, hit_i, hit_j


def raycast_reveal(belief: OccupancyGrid, truth: OccupancyGrid, pose: Pose,
                   lidar: LidarModel) -> np.ndarray:
    """Reveal truth cells visible to the scanner and return per-beam ranges.

    Beam k points at pose.theta + angular_span * k / beam_count. Cells a
    beam crosses before its first Occupied truth cell become Free in the
    belief when their center lies within max_range of the pose; the hit
    cell becomes Occupied. The returned array holds, per beam, the distance
    from the pose to the hit cell's center, or max_range for beams that
    ended in free space. Belief costs are re-inflated over the bounding box
    of the touched cells.
    """
    if belief.states.shape != truth.states.shape or belief.resolution != truth.resolution:
        raise MapError("belief and truth grids must share geometry")
    pi, pj = truth.world_to_cell(pose.x, pose.y)
    if not truth.in_bounds(pi, pj):
        raise PoseOutOfBoundsError(f"pose cell ({pi}, {pj}) outside {truth.width}x{truth.height}")
    if truth.states[pj, pi] == OCCUPIED:
        raise PoseInsideObstacleError(f"pose cell ({pi}, {pj}) is occupied")

    k = np.arange(lidar.beam_count, dtype=np.float64)
    angles = pose.theta + lidar.angular_span * k / lidar.beam_count
    vi, vj, hit_i, hit_j = _traverse_beams(truth, pose, angles, lidar.max_range)

    # Free marking is gated on the cell center being within range, which
    # keeps the revealed set equal to the rasterized visibility disk.
    cx = truth.origin[0] + (vi + 0.5) * truth.resolution
    cy = truth.origin[1] + (vj + 0.5) * truth.resolution
    in_range = (cx - pose.x) ** 2 + (cy - pose.y) ** 2 <= lidar.max_range**2
    free = truth.states[vj, vi] == FREE
    mark = in_range & free
    belief.states[vj[mark], vi[mark]] = FREE

    hit = hit_i >= 0
    belief.states[hit_j[hit], hit_i[hit]] = OCCUPIED

    ranges = np.full(lidar.beam_count, lidar.max_range, dtype=np.float64)
    if hit.any():
        hx = truth.origin[0] + (hit_i[hit] + 0.5) * truth.resolution
        hy = truth.origin[1] + (hit_j[hit] + 0.5) * truth.resolution
        ranges[hit] = np.hypot(hx - pose.x, hy - pose.y)

    reinflate_window(belief, int(vi.min()), int(vj.min()), int(vi.max()), int(vj.max()))
    return ranges


# ---------------------------------------------------------------------------
# Coverage metric
# ---------------------------------------------------------------------------

def reachable_free_mask(truth: OccupancyGrid, start: Pose) -> np.ndarray:
    """Free truth cells 4-connected to the start cell."""
    si, sj = truth.world_to_cell(start.x, start.y)
    if not truth.in_bounds(si, sj) or truth.states[sj, si] != FREE:
        raise StartUnreachableError(f"start cell ({si}, {sj}) is not a free truth cell")
    free = truth.states == FREE
    labels, _ = ndimage.label(free, structure=_FOUR_CONNECTED)
    return labels == labels[sj, si]


def exploration_rate(belief: OccupancyGrid, truth: OccupancyGrid, start: Pose,
                     reachable: np.ndarray | None = None) -> float:
    """Fraction of truth-reachable free cells that are known in the belief.

    The denominator is the 4-connected free component of the truth grid
    containing the start cell; passing a precomputed mask skips the flood
    fill when the metric is sampled every tick.
    """
    if belief.states.shape != truth.states.shape:
        raise MapError("belief and truth grids must share dimensions")
    if reachable is None:
        reachable = reachable_free_mask(truth, start)
    total = int(np.count_nonzero(reachable))
    known = int(np.count_nonzero(reachable & (belief.states != UNKNOWN)))
    return known / total
