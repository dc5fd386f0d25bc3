"""Seeded indoor map generator: rooms, doorways, box obstacles.

Three complexity tiers produce fully connected worlds of increasing size
and structure. Generation is a pure function of (tier, seed); maps whose
free space ends up disconnected are rejected and regenerated from a
derived seed, so the returned world is always fully explorable.
"""

from __future__ import annotations

import math
import random

import numpy as np
from scipy import ndimage

from .gridmap import FREE, OCCUPIED, InflationParams, OccupancyGrid, Pose, inflate

TIERS = ("low", "medium", "high")

_TIER_SHAPE = {"low": (19, 19), "medium": (29, 29), "high": (39, 39)}
_TIER_SECTIONS = {"low": (1, 2), "medium": (2, 2), "high": (3, 3)}
_TIER_BOXES = {"low": 3, "medium": 5, "high": 8}


def _carve_partitions(occ, rng, rows, cols):
    """Add internal walls splitting the interior into rows x cols sections,
    then open a 2-cell doorway through every wall between adjacent sections."""
    height, width = occ.shape
    h_walls = []  # j coordinates of horizontal walls
    v_walls = []
    for r in range(1, rows):
        lo = 1 + (height - 2) * r // rows - 1
        j = rng.randrange(max(2, lo), min(height - 3, lo + 3) + 1)
        h_walls.append(j)
        occ[j, 1 : width - 1] = OCCUPIED
    for c in range(1, cols):
        lo = 1 + (width - 2) * c // cols - 1
        i = rng.randrange(max(2, lo), min(width - 3, lo + 3) + 1)
        v_walls.append(i)
        occ[1 : height - 1, i] = OCCUPIED

    spans_i = [1] + [i for i in sorted(v_walls)] + [width - 1]
    spans_j = [1] + [j for j in sorted(h_walls)] + [height - 1]
    for j in h_walls:
        for a, b in zip(spans_i, spans_i[1:]):
            lo, hi = a + 1, b - 2
            if hi < lo:
                lo = hi = max(a + 1, min(b - 1, a + 1))
            gap = rng.randrange(lo, hi + 1)
            occ[j, gap : gap + 2] = FREE
    for i in v_walls:
        for a, b in zip(spans_j, spans_j[1:]):
            lo, hi = a + 1, b - 2
            if hi < lo:
                lo = hi = max(a + 1, min(b - 1, a + 1))
            gap = rng.randrange(lo, hi + 1)
            occ[gap : gap + 2, i] = FREE


def _scatter_boxes(occ, rng, count):
    height, width = occ.shape
    placed = 0
    for _ in range(count * 20):
        if placed >= count:
            break
        bw = rng.randrange(1, 3)
        bh = rng.randrange(1, 3)
        i = rng.randrange(2, width - 2 - bw)
        j = rng.randrange(2, height - 2 - bh)
        # Keep one free ring around the box so doorways never get sealed.
        region = occ[j - 1 : j + bh + 1, i - 1 : i + bw + 1]
        if (region == OCCUPIED).any():
            continue
        occ[j : j + bh, i : i + bw] = OCCUPIED
        placed += 1


def _is_connected(occ) -> bool:
    free = occ == FREE
    if not free.any():
        return False
    labels, count = ndimage.label(free, structure=ndimage.generate_binary_structure(2, 1))
    return count == 1


def generate_map(tier: str, seed: int, resolution: float = 0.25,
                 inflation: InflationParams | None = None) -> OccupancyGrid:
    """Deterministic ground-truth world for one (tier, seed) pair."""
    if tier not in TIERS:
        raise ValueError(f"tier must be one of {TIERS}, got {tier!r}")
    height, width = _TIER_SHAPE[tier]
    rows, cols = _TIER_SECTIONS[tier]
    for attempt in range(32):
        # str seeds hash via sha512 inside random.seed, so this stays
        # deterministic across processes (tuple seeds do not).
        rng = random.Random(f"{seed}:{tier}:{attempt}")
        occ = np.full((height, width), FREE, dtype=np.uint8)
        occ[0, :] = occ[-1, :] = OCCUPIED
        occ[:, 0] = occ[:, -1] = OCCUPIED
        _carve_partitions(occ, rng, rows, cols)
        _scatter_boxes(occ, rng, _TIER_BOXES[tier])
        if _is_connected(occ):
            break
    else:
        raise RuntimeError(f"could not generate a connected {tier} map for seed {seed}")
    inflation = inflation or InflationParams()
    costs = np.zeros_like(occ)
    grid = OccupancyGrid(width, height, resolution, occ, costs, inflation=inflation)
    inflate(grid, inflation.inscribed_radius, inflation.inflation_radius,
            inflation.decay_rate)
    return grid


def pick_start(truth: OccupancyGrid, seed: int) -> Pose:
    """Deterministic start pose on a free cell, away from the outer wall."""
    free_j, free_i = np.nonzero(truth.states == FREE)
    interior = ((free_i > 1) & (free_i < truth.width - 2)
                & (free_j > 1) & (free_j < truth.height - 2))
    if interior.any():
        free_i, free_j = free_i[interior], free_j[interior]
    rng = random.Random(f"{seed}:start:{truth.width}x{truth.height}")
    k = rng.randrange(len(free_i))
    x, y = truth.cell_center(int(free_i[k]), int(free_j[k]))
    theta = rng.uniform(-math.pi, math.pi)
    return Pose(x, y, theta)
