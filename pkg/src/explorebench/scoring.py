"""Waypoint scoring: distance score, occupancy score, and combined selection.

The distance score squashes robot-to-centroid distance into [0, 1) with
three regimes: a short-range region pinned near 0 (nearby candidates are
not penalized against each other), a rising mid band, and saturation near
1 for far candidates. alpha positions the rise, beta sets its steepness.

The occupancy score averages remapped costmap values over the disk that
encloses a segment and discounts long frontiers through a hyperbolic
secant of their length. Unknown-dominated disks score near 0, open or
wall-adjacent disks score high.

The combined score is the convex blend h = D * gamma + O * (1 - gamma),
and the next waypoint is the segment minimizing h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frontier import FrontierSegment
from .gridmap import OccupancyGrid, Pose, remap_costs

_ONE_BELOW_1 = float(np.nextafter(1.0, 0.0))


class NegativeDistanceError(ValueError):
    pass


class InputOutOfRangeError(ValueError):
    pass


class NoFrontiersError(Exception):
    """Raised when selection runs on an empty segment list (exploration done)."""


@dataclass(frozen=True)
class HeuristicParams:
    """Tuning knobs for the waypoint scores.

    alpha, beta are in meters and must be positive. gamma weights the
    distance score against the occupancy score and is capped at 1/2.
    af_scale converts frontier length to the dimensionless argument of
    sech. exp_arg_cap bounds every exponent so scores stay finite and
    bit-stable (e**30 is already deep in the saturated tail).
    """

    alpha: float = 3.0
    beta: float = 5.0
    gamma: float = 0.5
    af_scale: float = 1.0
    exp_arg_cap: float = 30.0

    def __post_init__(self):
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise ValueError(f"alpha and beta must be > 0, got {self.alpha}, {self.beta}")
        if not (0.0 <= self.gamma <= 0.5):
            raise ValueError(f"gamma must lie in [0, 0.5], got {self.gamma}")
        if self.af_scale <= 0.0:
            raise ValueError(f"af_scale must be > 0, got {self.af_scale}")
        if self.exp_arg_cap <= 0.0:
            raise ValueError(f"exp_arg_cap must be > 0, got {self.exp_arg_cap}")


@dataclass(frozen=True)
class ScoreBreakdown:
    """Per-segment scores kept for logging and the CLI score table."""

    segment_id: int
    d: float
    D: float
    O: float
    h: float


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _csch(x: float) -> float:
    # sinh overflows past ~710; csch is then zero to double precision.
    if x > 709.0:
        return 0.0
    return 1.0 / math.sinh(x)


def _sech(x: float) -> float:
    if x > 709.0:
        return 0.0
    return 1.0 / math.cosh(x)


def distance_score(d: float, params: HeuristicParams) -> float:
    """Squash a robot-to-centroid distance into [0, 1).

    D = tanh(E * sigmoid(E * (1 - csch(d / alpha)))) with E = exp(d / beta).
    D(0) is 0 by continuity (csch diverges, driving the sigmoid to zero).
    Exponent arguments are capped at exp_arg_cap and the sigmoid argument
    at exp_arg_cap**2, so the score is finite for any finite distance; the
    output is clamped one ulp below 1 to keep the range open.
    """
    if d < 0.0:
        raise NegativeDistanceError(f"distance must be >= 0, got {d}")
    if d == 0.0:
        return 0.0
    cap = params.exp_arg_cap
    big_e = math.exp(min(d / params.beta, cap))
    inner = big_e * (1.0 - _csch(d / params.alpha))
    inner = max(-cap * cap, min(cap * cap, inner))
    score = math.tanh(big_e * _sigmoid(inner))
    return min(score, _ONE_BELOW_1)


def occupancy_score(segment: FrontierSegment, belief: OccupancyGrid,
                    params: HeuristicParams) -> float:
    """Mean remapped cost over the segment's enclosing disk, scaled by sech.

    The disk is every in-bounds cell whose center lies within radius_r of
    the centroid (radius_r clamped up to one resolution so the disk always
    holds the centroid cell), and the average divides by the in-bounds cell
    count. The sech factor discounts long frontiers.
    """
    res = belief.resolution
    r = max(segment.radius_r, res)
    xf, yf = segment.centroid
    # Bounding box of candidate cells, then an exact center-in-disk mask.
    i_lo = max(0, int(math.floor((xf - r - belief.origin[0]) / res - 0.5)))
    i_hi = min(belief.width - 1, int(math.ceil((xf + r - belief.origin[0]) / res - 0.5)))
    j_lo = max(0, int(math.floor((yf - r - belief.origin[1]) / res - 0.5)))
    j_hi = min(belief.height - 1, int(math.ceil((yf + r - belief.origin[1]) / res - 0.5)))
    if i_lo > i_hi or j_lo > j_hi:
        return 0.0
    ii = np.arange(i_lo, i_hi + 1)
    jj = np.arange(j_lo, j_hi + 1)
    cx = belief.origin[0] + (ii + 0.5) * res
    cy = belief.origin[1] + (jj + 0.5) * res
    in_disk = (cx[None, :] - xf) ** 2 + (cy[:, None] - yf) ** 2 <= r * r
    if not in_disk.any():
        return 0.0
    window = belief.costs[j_lo : j_hi + 1, i_lo : i_hi + 1]
    mean_m = float(remap_costs(window)[in_disk].mean())
    return mean_m * _sech(params.af_scale * segment.length_af)


def heuristic(D: float, O: float, params: HeuristicParams) -> float:
    """Convex blend of the two scores: D * gamma + O * (1 - gamma)."""
    if not (0.0 <= D <= 1.0) or not (0.0 <= O <= 1.0):
        raise InputOutOfRangeError(f"scores must lie in [0, 1], got D={D}, O={O}")
    return D * params.gamma + O * (1.0 - params.gamma)


def score_segments(segments: list[FrontierSegment], robot: Pose,
                   belief: OccupancyGrid,
                   params: HeuristicParams) -> list[ScoreBreakdown]:
    """Score every segment against the robot pose."""
    breakdowns = []
    for idx, seg in enumerate(segments):
        d = math.hypot(robot.x - seg.centroid[0], robot.y - seg.centroid[1])
        D = distance_score(d, params)
        O = occupancy_score(seg, belief, params)
        breakdowns.append(ScoreBreakdown(idx, d, D, O, heuristic(D, O, params)))
    return breakdowns


def select_waypoint(segments: list[FrontierSegment], robot: Pose,
                    belief: OccupancyGrid, params: HeuristicParams,
                    ) -> tuple[FrontierSegment, list[ScoreBreakdown]]:
    """Pick the segment with minimal combined score.

    Ties break toward the smaller distance, then toward the earlier segment
    in canonical order. Raises NoFrontiersError on an empty list, which the
    exploration loop reads as completion.
    """
    if not segments:
        raise NoFrontiersError("no frontier segments to select from")
    breakdowns = score_segments(segments, robot, belief, params)
    best = min(breakdowns, key=lambda b: (b.h, b.d, b.segment_id))
    return segments[best.segment_id], breakdowns
