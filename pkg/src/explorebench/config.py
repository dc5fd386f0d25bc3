"""Experiment configuration: one INI-style file drives every CLI command.

Every knob has a default; `--print-defaults` emits the full annotated file
so experiment configs stay reviewable artifacts. Validation errors name
the offending section and key.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass

from .explorer import RunLimits, SelectorKind
from .gridmap import InflationParams, LidarModel, OccupancyGrid, Pose, load_map_file
from .mapgen import TIERS, generate_map
from .navigator import KinematicState
from .reward import RewardConfig
from .scoring import HeuristicParams

DEFAULT_CONFIG = """\
# explorebench experiment configuration (key = value, INI sections)

[maps]
# Explicit map files (whitespace separated, .txt ascii or .pgm + sidecar)
# take precedence over the generator when non-empty.
files =
# Generated set: whitespace separated tier:count pairs.
generate = low:2 medium:2 high:2
# Base seed for generated maps; map k of a tier uses map_seed + k.
map_seed = 100
resolution = 0.25

[selectors]
# heuristic | nearest | largest | random:<seed>
selectors = heuristic nearest

[heuristic]
alpha = 3.0
beta = 5.0
gamma = 0.5
af_scale = 1.0
exp_arg_cap = 30.0
# Minimum frontier segment size in cells (1 disables filtering).
min_segment_size = 1

[lidar]
beam_count = 360
max_range = 2.5
angular_span = 6.283185307179586

[kinematics]
v_max = 0.5
w_max = 2.0
dt = 0.25

[inflation]
inscribed_radius = 0.12
inflation_radius = 0.6
decay_rate = 4.0

[planner]
cost_weight = 3.0
goal_relax_radius = 5

[reward]
max_linear = 0.26
collision_threshold = 0.2
goal_threshold = 0.3
include_r_linear = false
# paren_minus_one | literal
distance_term_form = paren_minus_one

[limits]
max_ticks = 4000
expr_target = 0.99

[run]
# One run per (map, selector, seed); the seed also picks the start pose.
seeds = 1 2 3
outdir = out
# Any of: csv json svg
emit = csv json
"""


class ConfigError(Exception):
    pass


@dataclass
class ExperimentConfig:
    maps: list[tuple[str, OccupancyGrid]]
    selectors: list[SelectorKind]
    params: HeuristicParams
    lidar: LidarModel
    kinematics: KinematicState
    inflation: InflationParams
    reward: RewardConfig
    limits: RunLimits
    seeds: list[int]
    outdir: str
    emit: set[str]
    min_segment_size: int
    cost_weight: float
    goal_relax_radius: int


def _get(parser, section, key, cast, check=None):
    try:
        raw = parser.get(section, key)
    except (configparser.NoSectionError, configparser.NoOptionError):
        raise ConfigError(f"[{section}] {key}: missing") from None
    try:
        if cast is bool:
            value = raw.strip().lower()
            if value not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"not a boolean: {raw!r}")
            value = value in ("true", "1", "yes")
        else:
            value = cast(raw)
    except ValueError as e:
        raise ConfigError(f"[{section}] {key}: {e}") from None
    if check is not None and not check(value):
        raise ConfigError(f"[{section}] {key}: invalid value {value!r}")
    return value


def _load_maps(parser, inflation):
    files = _get(parser, "maps", "files", str).split()
    if files:
        maps = []
        for path in files:
            if not os.path.exists(path):
                raise ConfigError(f"[maps] files: {path} does not exist")
            name = os.path.splitext(os.path.basename(path))[0]
            try:
                maps.append((name, load_map_file(path, inflation)))
            except Exception as e:
                raise ConfigError(f"[maps] files: {path}: {e}") from None
        return maps
    spec = _get(parser, "maps", "generate", str).split()
    map_seed = _get(parser, "maps", "map_seed", int)
    resolution = _get(parser, "maps", "resolution", float, lambda v: v > 0)
    maps = []
    for item in spec:
        try:
            tier, count = item.split(":")
            count = int(count)
        except ValueError:
            raise ConfigError(f"[maps] generate: bad entry {item!r}") from None
        if tier not in TIERS:
            raise ConfigError(f"[maps] generate: unknown tier {tier!r}")
        for k in range(count):
            maps.append((f"{tier}{k:02d}",
                         generate_map(tier, map_seed + k, resolution, inflation)))
    if not maps:
        raise ConfigError("[maps] generate: no maps configured")
    return maps


def parse_config(text: str, need_maps: bool = True) -> ExperimentConfig:
    """Parse a config on top of the defaults.

    need_maps=False skips loading or generating the map set (score and
    reward only consume parameter sections).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string(DEFAULT_CONFIG)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"config parse error: {e}") from None

    try:
        inflation = InflationParams(
            _get(parser, "inflation", "inscribed_radius", float),
            _get(parser, "inflation", "inflation_radius", float),
            _get(parser, "inflation", "decay_rate", float),
        )
        params = HeuristicParams(
            _get(parser, "heuristic", "alpha", float),
            _get(parser, "heuristic", "beta", float),
            _get(parser, "heuristic", "gamma", float),
            _get(parser, "heuristic", "af_scale", float),
            _get(parser, "heuristic", "exp_arg_cap", float),
        )
        lidar = LidarModel(
            _get(parser, "lidar", "beam_count", int),
            _get(parser, "lidar", "max_range", float),
            _get(parser, "lidar", "angular_span", float),
        )
        kinematics = KinematicState(
            Pose(0.0, 0.0, 0.0),
            _get(parser, "kinematics", "v_max", float),
            _get(parser, "kinematics", "w_max", float),
            _get(parser, "kinematics", "dt", float),
        )
        reward = RewardConfig(
            _get(parser, "reward", "max_linear", float),
            _get(parser, "reward", "collision_threshold", float),
            _get(parser, "reward", "goal_threshold", float),
            _get(parser, "reward", "include_r_linear", bool),
            _get(parser, "reward", "distance_term_form", str),
        )
        limits = RunLimits(
            _get(parser, "limits", "max_ticks", int),
            _get(parser, "limits", "expr_target", float),
        )
    except (ValueError, ArithmeticError) as e:
        raise ConfigError(str(e)) from None

    selector_specs = _get(parser, "selectors", "selectors", str).split()
    if not selector_specs:
        raise ConfigError("[selectors] selectors: empty selector list")
    try:
        selectors = [SelectorKind.parse(s) for s in selector_specs]
    except ValueError as e:
        raise ConfigError(f"[selectors] selectors: {e}") from None

    seeds_raw = _get(parser, "run", "seeds", str).split()
    if not seeds_raw:
        raise ConfigError("[run] seeds: empty seed list")
    try:
        seeds = [int(s) for s in seeds_raw]
    except ValueError as e:
        raise ConfigError(f"[run] seeds: {e}") from None

    emit = set(_get(parser, "run", "emit", str).split())
    bad = emit - {"csv", "json", "svg"}
    if bad:
        raise ConfigError(f"[run] emit: unknown formats {sorted(bad)}")

    return ExperimentConfig(
        maps=_load_maps(parser, inflation) if need_maps else [],
        selectors=selectors,
        params=params,
        lidar=lidar,
        kinematics=kinematics,
        inflation=inflation,
        reward=reward,
        limits=limits,
        seeds=seeds,
        outdir=_get(parser, "run", "outdir", str),
        emit=emit,
        min_segment_size=_get(parser, "heuristic", "min_segment_size", int,
                              lambda v: v >= 1),
        cost_weight=_get(parser, "planner", "cost_weight", float, lambda v: v >= 0),
        goal_relax_radius=_get(parser, "planner", "goal_relax_radius", int,
                               lambda v: v >= 0),
    )


def load_config(path: str, need_maps: bool = True) -> ExperimentConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} does not exist")
    with open(path) as f:
        return parse_config(f.read(), need_maps)
