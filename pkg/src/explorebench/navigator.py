"""Deterministic local navigation: cost-aware A* plus a simple follower.

Planning runs on the belief grid. Traversable cells are known Free with a
cost below the inscribed band; Unknown is not traversable, so routes stay
inside mapped space and approach frontiers from the known side. Edge
weights scale step length by (1 + cost_weight * m(target)), pushing paths
away from inflated regions. Diagonal steps require both adjacent cardinal
cells to be traversable (no corner cutting).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .gridmap import (COST_INSCRIBED, FREE, OCCUPIED, OccupancyGrid, Pose,
                      remap_cost, wrap_angle)

SQRT2 = math.sqrt(2.0)

_STEPS = ((1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
          (1, 1, SQRT2), (1, -1, SQRT2), (-1, 1, SQRT2), (-1, -1, SQRT2))


class NoPathError(Exception):
    pass


@dataclass
class PlannedPath:
    """A* output: 8-adjacent cell centers from start to goal."""

    waypoints: list[tuple[float, float]]
    total_cost: float
    total_length: float


@dataclass
class KinematicState:
    pose: Pose
    v_max: float = 0.5
    w_max: float = 2.0
    dt: float = 0.25

    def __post_init__(self):
        if self.v_max <= 0.0 or self.w_max <= 0.0 or self.dt <= 0.0:
            raise ValueError("v_max, w_max and dt must all be > 0")


def traversable_mask(belief: OccupancyGrid) -> np.ndarray:
    return (belief.states == FREE) & (belief.costs < COST_INSCRIBED)


def _nearest_traversable(belief, trav, gi, gj, radius):
    """Closest traversable cell to (gi, gj) within a square search radius."""
    best = None
    for dj in range(-radius, radius + 1):
        for di in range(-radius, radius + 1):
            ni, nj = gi + di, gj + dj
            if not belief.in_bounds(ni, nj) or not trav[nj, ni]:
                continue
            key = (di * di + dj * dj, nj * belief.width + ni)
            if best is None or key < best[0]:
                best = (key, ni, nj)
    if best is None:
        return None
    return best[1], best[2]


def plan_path(belief: OccupancyGrid, start: Pose, to_world: tuple[float, float],
              cost_weight: float = 3.0, goal_relax_radius: int = 5) -> PlannedPath:
    """Optimal A* path from the start pose to the cell nearest to_world.

    The start cell itself is always treated as traversable (the robot is
    standing on it, possibly inside freshly inflated cost). If the goal
    cell is untraversable, the goal relaxes to the nearest traversable cell
    within goal_relax_radius cells; raises NoPathError when no goal
    candidate is reachable.
    """
    res = belief.resolution
    si, sj = belief.world_to_cell(start.x, start.y)
    if not belief.in_bounds(si, sj) or belief.states[sj, si] == OCCUPIED:
        raise NoPathError(f"start cell ({si}, {sj}) is not usable")
    trav = traversable_mask(belief)
    trav[sj, si] = True

    gi, gj = belief.world_to_cell(*to_world)
    gi = min(max(gi, 0), belief.width - 1)
    gj = min(max(gj, 0), belief.height - 1)
    if not trav[gj, gi]:
        relaxed = _nearest_traversable(belief, trav, gi, gj, goal_relax_radius)
        if relaxed is None:
            raise NoPathError("goal cell untraversable and no relaxation candidate")
        gi, gj = relaxed

    # Admissible octile heuristic: every edge multiplier is >= 1.
    def octile(i, j):
        di, dj = abs(i - gi), abs(j - gj)
        return (max(di, dj) + (SQRT2 - 1.0) * min(di, dj)) * res

    start_key = (si, sj)
    goal_key = (gi, gj)
    g_cost = {start_key: 0.0}
    parent = {}
    counter = 0
    open_heap = [(octile(si, sj), counter, start_key)]
    closed = set()
    while open_heap:
        f, _, current = heapq.heappop(open_heap)
        if current in closed:
            continue
        if current == goal_key:
            break
        closed.add(current)
        ci, cj = current
        base = g_cost[current]
        for di, dj, step in _STEPS:
            ni, nj = ci + di, cj + dj
            if not belief.in_bounds(ni, nj) or not trav[nj, ni]:
                continue
            if di != 0 and dj != 0 and not (trav[cj, ni] and trav[nj, ci]):
                continue
            weight = step * res * (1.0 + cost_weight * remap_cost(belief.costs[nj, ni]))
            tentative = base + weight
            key = (ni, nj)
            if tentative < g_cost.get(key, math.inf):
                g_cost[key] = tentative
                parent[key] = current
                counter += 1
                heapq.heappush(open_heap, (tentative + octile(ni, nj), counter, key))
    else:
        raise NoPathError(f"no path from ({si}, {sj}) to ({gi}, {gj})")

    cells = [goal_key]
    while cells[-1] != start_key:
        cells.append(parent[cells[-1]])
    cells.reverse()
    waypoints = [belief.cell_center(i, j) for i, j in cells]
    length = sum(
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(cells, cells[1:])
    ) * res
    return PlannedPath(waypoints, g_cost[goal_key], length)


def advance(state: KinematicState, waypoints: list[tuple[float, float]],
            belief: OccupancyGrid) -> float:
    """One control tick toward the first remaining waypoint.

    Turns at most w_max * dt toward the waypoint, then moves forward
    min(v_max * dt, distance to the waypoint) when the residual heading
    error is within 45 degrees. Motion into a cell that is not known Free
    is refused, so the robot never stands on an Occupied (or Unknown)
    belief cell. Waypoints within half a cell of the new pose are popped
    from the front of the list. Returns the distance actually moved.
    """
    if not waypoints:
        return 0.0
    pose = state.pose
    tx, ty = waypoints[0]
    to_target = math.hypot(tx - pose.x, ty - pose.y)
    if to_target > 0.0:
        desired = math.atan2(ty - pose.y, tx - pose.x)
        err = wrap_angle(desired - pose.theta)
        turn = max(-state.w_max * state.dt, min(state.w_max * state.dt, err))
        pose.theta = wrap_angle(pose.theta + turn)
        err = wrap_angle(desired - pose.theta)
    else:
        err = 0.0

    moved = 0.0
    if abs(err) <= math.pi / 4.0:
        step = min(state.v_max * state.dt, to_target)
        nx = pose.x + step * math.cos(pose.theta)
        ny = pose.y + step * math.sin(pose.theta)
        ci, cj = belief.world_to_cell(nx, ny)
        same_cell = (ci, cj) == belief.world_to_cell(pose.x, pose.y)
        if belief.in_bounds(ci, cj) and (same_cell or belief.states[cj, ci] == FREE):
            pose.x, pose.y = nx, ny
            moved = step

    half_cell = 0.5 * belief.resolution
    while waypoints and math.hypot(waypoints[0][0] - pose.x,
                                   waypoints[0][1] - pose.y) <= half_cell:
        waypoints.pop(0)
    return moved
