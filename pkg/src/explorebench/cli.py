"""Command line interface: run experiments, inspect scores, compute rewards.

Subcommands:
  run      execute every (map, selector, seed) run and write artifacts
  compare  same runs, aggregated into one Table-style CSV plus a summary
  score    print the per-segment score table for a map/belief snapshot
  reward   turn JSON step observations into reward CSV lines

Exit codes: 0 success (run/compare: all runs complete), 1 config or I/O
error, 2 some run stalled or hit the tick limit, 3 no frontiers (score).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import DEFAULT_CONFIG, ConfigError, ExperimentConfig, load_config
from .explorer import (OUTCOME_COMPLETE, RunResult, aggregate_results,
                       run_exploration)
from .frontier import cluster_segments, detect_frontiers
from .gridmap import Pose, load_belief, load_map_file
from .mapgen import pick_start
from .render import run_svg
from .reward import RewardConfig, StepObservation, compute_reward, reward_terms
from .scoring import score_segments

SAMPLES_CSV_HEADER = ["t", "x", "y", "cumulative_distance", "exploration_rate"]
AGGREGATE_CSV_HEADER = [
    "map", "selector", "runs", "complete",
    "dist_mean", "dist_min", "dist_max", "dist_std",
    "time_mean", "time_min", "time_max", "time_std",
    "expr_mean", "expr_min", "expr_max", "expr_std",
]
SCORE_CSV_HEADER = ["segment_id", "d", "D", "O", "h", "chosen"]
REWARD_CSV_HEADER = ["r_yaw", "r_linear", "r_angular", "r_distance",
                     "r_obstacle", "reward"]


def samples_csv(record) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SAMPLES_CSV_HEADER)
    for t, x, y, _theta, dist, rate in record.samples:
        writer.writerow([repr(t), repr(x), repr(y), repr(dist), repr(rate)])
    return buf.getvalue()


def aggregate_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_CSV_HEADER)
    for row in rows:
        writer.writerow([row["map"], row["selector"], row["runs"], row["complete"]]
                        + [repr(row[k]) for k in AGGREGATE_CSV_HEADER[4:]])
    return buf.getvalue()


def record_json(record) -> str:
    return json.dumps(record.to_json(), sort_keys=True, indent=2) + "\n"


def _artifact_stem(map_name, selector, seed) -> str:
    return f"{map_name}_{selector.label().replace(':', '-')}_{seed}"


def _write_artifacts(outdir, result: RunResult, emit):
    stem = os.path.join(outdir, _artifact_stem(result.map_name, result.selector,
                                               result.seed))
    if "json" in emit:
        with open(stem + ".json", "w") as f:
            f.write(record_json(result.record))
    if "csv" in emit:
        with open(stem + ".csv", "w") as f:
            f.write(samples_csv(result.record))
    if "svg" in emit:
        with open(stem + ".svg", "w") as f:
            f.write(run_svg(result.record))


def _execute_run(spec):
    map_name, truth, selector, seed, cfg_bits = spec
    params, lidar, kin, limits, min_size, cost_weight, relax = cfg_bits
    start = pick_start(truth, seed)
    record = run_exploration(truth, start, selector, params, lidar, kin, limits,
                             min_segment_size=min_size, cost_weight=cost_weight,
                             goal_relax_radius=relax)
    return RunResult(map_name, selector, seed, start, record)


def _all_runs(cfg: ExperimentConfig, jobs: int) -> list[RunResult]:
    bits = (cfg.params, cfg.lidar, cfg.kinematics, cfg.limits,
            cfg.min_segment_size, cfg.cost_weight, cfg.goal_relax_radius)
    specs = [(name, truth, selector, seed, bits)
             for name, truth in cfg.maps
             for seed in cfg.seeds
             for selector in cfg.selectors]
    if jobs <= 1:
        return [_execute_run(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_execute_run, specs))


def cmd_run(cfg: ExperimentConfig, jobs: int) -> int:
    os.makedirs(cfg.outdir, exist_ok=True)
    results = _all_runs(cfg, jobs)
    all_complete = True
    for r in results:
        _write_artifacts(cfg.outdir, r, cfg.emit)
        rec = r.record
        print(f"{_artifact_stem(r.map_name, r.selector, r.seed)}: {rec.outcome} "
              f"dist={rec.total_distance:.3f}m time={rec.total_time:.1f}s "
              f"expr={rec.final_rate * 100:.2f}%")
        if rec.outcome != OUTCOME_COMPLETE:
            all_complete = False
    return 0 if all_complete else 2


def cmd_compare(cfg: ExperimentConfig, jobs: int) -> int:
    os.makedirs(cfg.outdir, exist_ok=True)
    results = _all_runs(cfg, jobs)
    rows = aggregate_results(results, by_map=True)
    with open(os.path.join(cfg.outdir, "aggregate.csv"), "w") as f:
        f.write(aggregate_csv(rows))
    for row in aggregate_results(results, by_map=False):
        print(f"{row['selector']}: runs={row['runs']} "
              f"dist={row['dist_mean']:.3f}m time={row['time_mean']:.1f}s "
              f"expr={row['expr_mean'] * 100:.2f}%")
    all_complete = all(r.record.outcome == OUTCOME_COMPLETE for r in results)
    return 0 if all_complete else 2


def cmd_score(cfg: ExperimentConfig, map_path, belief_path, pose_text) -> int:
    truth = load_map_file(map_path, cfg.inflation)
    with open(belief_path) as f:
        belief = load_belief(f.read(), cfg.inflation)
    if belief.states.shape != truth.states.shape:
        print("error: belief and map dimensions differ", file=sys.stderr)
        return 1
    try:
        x, y, theta = (float(v) for v in pose_text.split(","))
    except ValueError:
        print(f"error: bad pose {pose_text!r}, expected x,y,theta", file=sys.stderr)
        return 1
    robot = Pose(x, y, theta)
    segments = cluster_segments(detect_frontiers(belief), belief,
                                cfg.min_segment_size)
    if not segments:
        print("no frontiers", file=sys.stderr)
        return 3
    breakdowns = score_segments(segments, robot, belief, cfg.params)
    best = min(breakdowns, key=lambda b: (b.h, b.d, b.segment_id))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(SCORE_CSV_HEADER)
    for b in breakdowns:
        writer.writerow([b.segment_id, repr(b.d), repr(b.D), repr(b.O), repr(b.h),
                         str(b.segment_id == best.segment_id).lower()])
    return 0


def cmd_reward(reward_cfg: RewardConfig, stream) -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(REWARD_CSV_HEADER)
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            payload = json.loads(line)
            obs = StepObservation(**payload)
        except (ValueError, TypeError) as e:
            print(f"error: line {lineno}: {e}", file=sys.stderr)
            return 1
        terms = reward_terms(obs, reward_cfg)
        total = compute_reward(obs, reward_cfg)
        writer.writerow([repr(terms[k]) for k in REWARD_CSV_HEADER[:-1]]
                        + [repr(total)])
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="explorebench",
        description="Deterministic frontier-exploration simulator and benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "compare"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment config file")
        p.add_argument("--jobs", type=int, default=1, help="parallel runs")
        p.add_argument("--print-defaults", action="store_true")
    p = sub.add_parser("score")
    p.add_argument("--config", help="experiment config file (for params)")
    p.add_argument("--map", dest="map_path", help="ground-truth map file")
    p.add_argument("--belief", dest="belief_path", help="belief snapshot (ascii)")
    p.add_argument("--pose", help="robot pose as x,y,theta")
    p.add_argument("--print-defaults", action="store_true")
    p = sub.add_parser("reward")
    p.add_argument("--config", help="experiment config file (for reward params)")
    p.add_argument("--input", help="JSON-lines observation file (default stdin)")
    p.add_argument("--print-defaults", action="store_true")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.print_defaults:
        sys.stdout.write(DEFAULT_CONFIG)
        return 0
    try:
        if args.command in ("run", "compare"):
            if not args.config:
                print("error: --config is required", file=sys.stderr)
                return 1
            cfg = load_config(args.config)
            jobs = max(1, args.jobs)
            return cmd_run(cfg, jobs) if args.command == "run" else cmd_compare(cfg, jobs)
        if args.command == "score":
            if not (args.map_path and args.belief_path and args.pose):
                print("error: score needs --map, --belief and --pose", file=sys.stderr)
                return 1
            cfg = (load_config(args.config, need_maps=False) if args.config
                   else _default_cfg())
            return cmd_score(cfg, args.map_path, args.belief_path, args.pose)
        if args.command == "reward":
            cfg = (load_config(args.config, need_maps=False) if args.config
                   else _default_cfg())
            if args.input:
                with open(args.input) as f:
                    return cmd_reward(cfg.reward, f)
            return cmd_reward(cfg.reward, sys.stdin)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 1
    return 0


def _default_cfg() -> ExperimentConfig:
    from .config import parse_config

    return parse_config("", need_maps=False)


if __name__ == "__main__":
    sys.exit(main())
