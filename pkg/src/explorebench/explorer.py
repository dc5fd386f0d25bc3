"""The closed exploration loop, baseline selectors, and the benchmark harness.

Each tick reveals the world through the simulated scanner, samples the
coverage metric, and advances the robot along its current path. Waypoint
selection is event driven: the loop re-scores frontiers only when the
current path is consumed, invalidated by newly revealed obstacles, or its
target segment disappears from the frontier mask. Runs are pure functions
of their inputs; repeated runs produce identical records.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .frontier import FrontierSegment, cluster_segments, detect_frontiers
from .gridmap import (COST_INSCRIBED, FREE, LidarModel, OccupancyGrid, Pose,
                      exploration_rate, raycast_reveal, reachable_free_mask)
from .gridmap import to_ascii as _grid_ascii
from .navigator import KinematicState, NoPathError, plan_path
from .navigator import advance as kin_advance
from .scoring import (HeuristicParams, NoFrontiersError, ScoreBreakdown,
                      score_segments)

SELECTOR_KINDS = ("heuristic", "nearest", "largest", "random")

OUTCOME_COMPLETE = "complete"
OUTCOME_STALLED = "stalled"
OUTCOME_TICK_LIMIT = "tick_limit"


@dataclass(frozen=True)
class SelectorKind:
    """Which waypoint policy a run uses; random carries its own seed."""

    kind: str
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in SELECTOR_KINDS:
            raise ValueError(f"kind must be one of {SELECTOR_KINDS}, got {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random selector needs an explicit seed")

    @classmethod
    def parse(cls, text: str) -> "SelectorKind":
        """Parse 'heuristic' or 'random:123' style selector specs."""
        if ":" in text:
            kind, seed = text.split(":", 1)
            return cls(kind.strip(), int(seed))
        return cls(text.strip())

    def label(self) -> str:
        return self.kind if self.seed is None else f"{self.kind}:{self.seed}"


@dataclass(frozen=True)
class RunLimits:
    max_ticks: int = 4000
    expr_target: float = 0.99

    def __post_init__(self):
        if self.max_ticks < 1:
            raise ValueError("max_ticks must be >= 1")
        if not (0.0 < self.expr_target <= 1.0):
            raise ValueError("expr_target must lie in (0, 1]")


@dataclass
class Decision:
    tick: int
    chosen: int
    target: tuple[float, float]
    scores: list[ScoreBreakdown]

    def to_json(self) -> dict:
        return {
            "tick": self.tick,
            "chosen": self.chosen,
            "target": [self.target[0], self.target[1]],
            "scores": [
                {"segment_id": s.segment_id, "d": s.d, "D": s.D, "O": s.O, "h": s.h}
                for s in self.scores
            ],
        }


@dataclass
class RunRecord:
    """Full trace of one exploration run."""

    selector: SelectorKind
    params: HeuristicParams
    start: Pose
    outcome: str = OUTCOME_TICK_LIMIT
    samples: list[tuple[float, float, float, float, float, float]] = field(
        default_factory=list
    )  # (t, x, y, theta, cumulative_distance, exploration_rate)
    decisions: list[Decision] = field(default_factory=list)
    final_belief: OccupancyGrid | None = None

    @property
    def total_distance(self) -> float:
        return self.samples[-1][4] if self.samples else 0.0

    @property
    def total_time(self) -> float:
        return self.samples[-1][0] if self.samples else 0.0

    @property
    def final_rate(self) -> float:
        return self.samples[-1][5] if self.samples else 0.0

    def to_json(self) -> dict:
        return {
            "selector": self.selector.label(),
            "params": {
                "alpha": self.params.alpha,
                "beta": self.params.beta,
                "gamma": self.params.gamma,
                "af_scale": self.params.af_scale,
                "exp_arg_cap": self.params.exp_arg_cap,
            },
            "start": {"x": self.start.x, "y": self.start.y, "theta": self.start.theta},
            "outcome": self.outcome,
            "totals": {
                "distance": self.total_distance,
                "time": self.total_time,
                "exploration_rate": self.final_rate,
                "ticks": len(self.samples) - 1 if self.samples else 0,
            },
            "samples": [list(s) for s in self.samples],
            "decisions": [d.to_json() for d in self.decisions],
            "final_belief": (None if self.final_belief is None
                             else _grid_ascii(self.final_belief)),
        }


def rank_segments(selector: SelectorKind, segments: list[FrontierSegment],
                  robot: Pose, belief: OccupancyGrid, params: HeuristicParams,
                  ) -> tuple[list[int], list[ScoreBreakdown]]:
    """Order segment indices by the selector's preference (best first).

    Score breakdowns are computed for every policy so run logs stay
    comparable across selectors; only the heuristic policy ranks by them.
    """
    if not segments:
        raise NoFrontiersError("no frontier segments to select from")
    breakdowns = score_segments(segments, robot, belief, params)
    if selector.kind == "heuristic":
        order = sorted(breakdowns, key=lambda b: (b.h, b.d, b.segment_id))
    elif selector.kind == "nearest":
        order = sorted(breakdowns, key=lambda b: (b.d, b.segment_id))
    elif selector.kind == "largest":
        order = sorted(
            breakdowns,
            key=lambda b: (-segments[b.segment_id].length_af, b.d, b.segment_id),
        )
    else:
        ci, cj = belief.world_to_cell(robot.x, robot.y)
        rng = random.Random(f"{selector.seed}:{len(segments)}:{ci}:{cj}")
        return rng.sample(range(len(segments)), len(segments)), breakdowns
    return [b.segment_id for b in order], breakdowns


def select_baseline(selector: SelectorKind, segments: list[FrontierSegment],
                    robot: Pose, belief: OccupancyGrid,
                    params: HeuristicParams) -> FrontierSegment:
    """The selector's top choice (NoFrontiersError on an empty list)."""
    ranked, _ = rank_segments(selector, segments, robot, belief, params)
    return segments[ranked[0]]


def _path_cells_valid(belief, waypoints, robot_cell):
    for x, y in waypoints:
        i, j = belief.world_to_cell(x, y)
        if (i, j) == robot_cell:
            continue
        if belief.states[j, i] != FREE or belief.costs[j, i] >= COST_INSCRIBED:
            return False
    return True


def run_exploration(truth: OccupancyGrid, start: Pose, selector: SelectorKind,
                    params: HeuristicParams, lidar: LidarModel,
                    kin: KinematicState, limits: RunLimits,
                    min_segment_size: int = 3, cost_weight: float = 3.0,
                    goal_relax_radius: int = 5) -> RunRecord:
    """Explore the truth map from start until done, stalled, or out of ticks."""
    reachable = reachable_free_mask(truth, start)
    belief = OccupancyGrid.unknown(truth.width, truth.height, truth.resolution,
                                   truth.origin, truth.inflation)
    state = KinematicState(Pose(start.x, start.y, start.theta),
                           kin.v_max, kin.w_max, kin.dt)
    record = RunRecord(selector=selector, params=params,
                       start=Pose(start.x, start.y, start.theta))

    raycast_reveal(belief, truth, state.pose, lidar)
    rate = exploration_rate(belief, truth, start, reachable)
    cumdist = 0.0
    record.samples.append((0.0, state.pose.x, state.pose.y, state.pose.theta,
                           cumdist, rate))

    waypoints: list[tuple[float, float]] = []
    target_cells: tuple[np.ndarray, np.ndarray] | None = None
    no_progress = 0
    # Enough ticks for a full in-place rotation plus slack.
    stuck_limit = int(math.pi / (kin.w_max * kin.dt)) + 8

    for tick in range(1, limits.max_ticks + 1):
        if rate >= limits.expr_target:
            record.outcome = OUTCOME_COMPLETE
            break

        mask = detect_frontiers(belief)
        robot_cell = belief.world_to_cell(state.pose.x, state.pose.y)
        if waypoints:
            vanished = (target_cells is not None
                        and not mask.marks[target_cells[1], target_cells[0]].any())
            if (vanished or no_progress >= stuck_limit
                    or not _path_cells_valid(belief, waypoints, robot_cell)):
                waypoints = []
                no_progress = 0

        if not waypoints:
            segments = cluster_segments(mask, belief, min_segment_size)
            if not segments:
                record.outcome = OUTCOME_COMPLETE
                break
            ranked, breakdowns = rank_segments(selector, segments, state.pose,
                                               belief, params)
            chosen = None
            for idx in ranked:
                try:
                    path = plan_path(belief, state.pose, segments[idx].centroid,
                                     cost_weight, goal_relax_radius)
                except NoPathError:
                    continue
                if len(path.waypoints) <= 1:
                    # Already standing at the relaxed goal and the frontier
                    # still exists, so it cannot be seen from here: dead end.
                    continue
                chosen = idx
                waypoints = list(path.waypoints)
                break
            if chosen is None:
                record.outcome = OUTCOME_STALLED
                break
            seg = segments[chosen]
            target_cells = (seg.cells[:, 0].copy(), seg.cells[:, 1].copy())
            record.decisions.append(Decision(tick, chosen, seg.centroid, breakdowns))

        moved = kin_advance(state, waypoints, belief)
        cumdist += moved
        no_progress = 0 if moved > 0.0 else no_progress + 1

        raycast_reveal(belief, truth, state.pose, lidar)
        rate = exploration_rate(belief, truth, start, reachable)
        record.samples.append((tick * kin.dt, state.pose.x, state.pose.y,
                               state.pose.theta, cumdist, rate))
    else:
        record.outcome = OUTCOME_TICK_LIMIT
    record.final_belief = belief
    return record


# ---------------------------------------------------------------------------
# Benchmark harness
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    map_name: str
    selector: SelectorKind
    seed: int
    start: Pose
    record: RunRecord


def compare_selectors(maps: list[tuple[str, OccupancyGrid]],
                      selectors: list[SelectorKind], params: HeuristicParams,
                      seeds: list[int], lidar: LidarModel, kin: KinematicState,
                      limits: RunLimits, start_for=None,
                      **run_kwargs) -> list[RunResult]:
    """Run every (map, selector, seed) combination.

    start_for(truth, seed) supplies the start pose per map and seed; the
    default uses the seeded free-cell pick from mapgen.
    """
    if not maps or not selectors or not seeds:
        raise ValueError("maps, selectors and seeds must all be non-empty")
    if start_for is None:
        from .mapgen import pick_start
        start_for = pick_start
    results = []
    for map_name, truth in maps:
        for seed in seeds:
            start = start_for(truth, seed)
            for selector in selectors:
                record = run_exploration(truth, start, selector, params, lidar,
                                         kin, limits, **run_kwargs)
                results.append(RunResult(map_name, selector, seed, start, record))
    return results


def aggregate_results(results: list[RunResult],
                      by_map: bool = True) -> list[dict]:
    """Table III style statistics per selector (optionally per map)."""
    groups: dict[tuple, list[RunResult]] = {}
    for r in results:
        key = (r.map_name, r.selector.label()) if by_map else (r.selector.label(),)
        groups.setdefault(key, []).append(r)

    def stats(values):
        arr = np.asarray(values, dtype=np.float64)
        return {
            "mean": float(arr.mean()),
            "min": float(arr.min()),
            "max": float(arr.max()),
            "std": float(arr.std()),
        }

    rows = []
    for key in sorted(groups):
        runs = groups[key]
        row = {
            "map": key[0] if by_map else "all",
            "selector": key[-1],
            "runs": len(runs),
            "complete": sum(1 for r in runs if r.record.outcome == OUTCOME_COMPLETE),
        }
        for metric, getter in (
            ("dist", lambda r: r.record.total_distance),
            ("time", lambda r: r.record.total_time),
            ("expr", lambda r: r.record.final_rate),
        ):
            s = stats([getter(r) for r in runs])
            for stat_name, value in s.items():
                row[f"{metric}_{stat_name}"] = value
        rows.append(row)
    return rows
