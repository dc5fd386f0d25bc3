import numpy as np
import pytest

from explorebench.gridmap import (FREE, OCCUPIED, UNKNOWN, InflationParams,
                                  OccupancyGrid, inflate)

STATE_CHARS = {".": FREE, "#": OCCUPIED, "?": UNKNOWN}


def grid_from_rows(rows, resolution=0.25, inflation=None, inflate_costs=True):
    """Build a grid from a list of equal-length strings ('.', '#', '?')."""
    height = len(rows)
    width = len(rows[0])
    states = np.empty((height, width), dtype=np.uint8)
    for j, row in enumerate(rows):
        assert len(row) == width, f"row {j} length mismatch"
        for i, ch in enumerate(row):
            states[j, i] = STATE_CHARS[ch]
    inflation = inflation or InflationParams()
    grid = OccupancyGrid(width, height, resolution, states,
                         np.zeros_like(states), inflation=inflation)
    if inflate_costs:
        inflate(grid, inflation.inscribed_radius, inflation.inflation_radius,
                inflation.decay_rate)
    else:
        grid.costs[states == UNKNOWN] = 255
        grid.costs[states == OCCUPIED] = 254
    return grid


@pytest.fixture
def rng():
    return np.random.RandomState(20240811)
