"""Benchmark environments: square-obstacle grids and origin/destination sampling.

Coordinates are 0-based ``(x, y)`` with ``x`` the row and ``y`` the column, so
"Right" is ``(x, y + 1)`` and "Down" is ``(x + 1, y)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any, Iterable, NamedTuple

from gridbench.errors import ConfigError, PlacementExhausted, SamplingExhausted
from gridbench.rng import SplitMix64, derive_seed

SCHEMA_VERSION = 1
DEFAULT_MAX_ATTEMPTS = 10_000
MIN_DISTANCE_FRACTION = 0.3


class Coord(NamedTuple):
    x: int  # row
    y: int  # column


class Obstacle(NamedTuple):
    top_left: Coord
    bottom_right: Coord

    @classmethod
    def square(cls, x: int, y: int, side: int) -> Obstacle:
        return cls(Coord(x, y), Coord(x + side - 1, y + side - 1))

    def contains(self, c: tuple[int, int]) -> bool:
        return (
            self.top_left.x <= c[0] <= self.bottom_right.x
            and self.top_left.y <= c[1] <= self.bottom_right.y
        )

    def overlaps(self, other: Obstacle) -> bool:
        return not (
            self.bottom_right.x < other.top_left.x
            or other.bottom_right.x < self.top_left.x
            or self.bottom_right.y < other.top_left.y
            or other.bottom_right.y < self.top_left.y
        )

    def cells(self) -> list[Coord]:
        return [
            Coord(x, y)
            for x in range(self.top_left.x, self.bottom_right.x + 1)
            for y in range(self.top_left.y, self.bottom_right.y + 1)
        ]


@dataclass(frozen=True)
class GridWorld:
    """An ``n_size`` x ``n_size`` grid with axis-aligned rectangular obstacles."""

    n_size: int
    obstacles: tuple[Obstacle, ...] = ()
    seed: int = 0
    env_index: int = 0

    @classmethod
    def from_corners(
        cls,
        n_size: int,
        corners: Iterable[tuple[tuple[int, int], tuple[int, int]]],
        seed: int = 0,
        env_index: int = 0,
    ) -> GridWorld:
        obstacles = tuple(Obstacle(Coord(*tl), Coord(*br)) for tl, br in corners)
        return cls(n_size, obstacles, seed, env_index)

    @property
    def env_id(self) -> str:
        return f"N{self.n_size}-e{self.env_index:03d}"

    @cached_property
    def blocked(self) -> frozenset[Coord]:
        return frozenset(c for ob in self.obstacles for c in ob.cells())

    def free_cells(self) -> list[Coord]:
        """All in-bounds non-obstacle cells in row-major order."""
        blocked = self.blocked
        return [
            Coord(x, y)
            for x in range(self.n_size)
            for y in range(self.n_size)
            if (x, y) not in blocked
        ]


@dataclass(frozen=True)
class TaskCase:
    case_id: str
    env_ref: str
    start: Coord
    end: Coord
    reference_path: tuple[Coord, ...]
    optimal_len: int


@dataclass(frozen=True)
class SuiteConfig:
    n_size: int
    n_obstacles: int
    obstacle_side: int
    envs_per_config: int = 20
    pairs_per_env: int = 5
    seed: int = 0
    max_attempts: int = field(default=DEFAULT_MAX_ATTEMPTS, compare=False)

    @classmethod
    def defaults(cls, seed: int = 0) -> list[SuiteConfig]:
        """The three benchmark configurations: 10/2/3, 20/3/4, 30/4/5."""
        return [cls.for_size(n, seed=seed) for n in (10, 20, 30)]

    @classmethod
    def for_size(cls, n_size: int, **overrides: Any) -> SuiteConfig:
        presets = {10: (2, 3), 20: (3, 4), 30: (4, 5)}
        if n_size not in presets:
            raise ConfigError(f"no preset for grid size {n_size}; pass n_obstacles/obstacle_side")
        n_obstacles, side = presets[n_size]
        return cls(n_size, n_obstacles, side, **overrides)

    def validate(self) -> None:
        if self.n_size < 1:
            raise ConfigError("n_size must be >= 1")
        if self.n_obstacles < 0:
            raise ConfigError("n_obstacles must be >= 0")
        if not 1 <= self.obstacle_side <= self.n_size:
            raise ConfigError("obstacle_side must lie in [1, n_size]")
        if self.n_obstacles * self.obstacle_side**2 > self.n_size**2:
            raise ConfigError("obstacles cannot fit in the grid")
        if self.envs_per_config < 1 or self.pairs_per_env < 1:
            raise ConfigError("envs_per_config and pairs_per_env must be >= 1")

    def to_dict(self) -> dict[str, int]:
        d = asdict(self)
        d.pop("max_attempts")
        return d


def in_bounds(world: GridWorld, c: tuple[int, int]) -> bool:
    return 0 <= c[0] < world.n_size and 0 <= c[1] < world.n_size


def is_obstacle(world: GridWorld, c: tuple[int, int]) -> bool:
    """Inclusive rectangle membership; out-of-bounds cells are never obstacles."""
    return (c[0], c[1]) in world.blocked


def min_pair_distance(n_size: int) -> float:
    """30% of the corner-to-corner cell-centre diagonal."""
    return MIN_DISTANCE_FRACTION * math.sqrt(2) * (n_size - 1)


def generate_environment(config: SuiteConfig, env_index: int) -> GridWorld:
    """Place ``n_obstacles`` disjoint ``s x s`` squares by rejection sampling."""
    config.validate()
    n, side = config.n_size, config.obstacle_side
    rng = SplitMix64.stream(config.seed, n, env_index, "obstacles")
    placed: list[Obstacle] = []
    attempts = 0
    while len(placed) < config.n_obstacles:
        if attempts >= config.max_attempts:
            raise PlacementExhausted(
                f"placed {len(placed)}/{config.n_obstacles} obstacles after "
                f"{attempts} attempts (env {env_index})",
                env_index=env_index,
            )
        attempts += 1
        candidate = Obstacle.square(rng.randint(0, n - side), rng.randint(0, n - side), side)
        if not any(candidate.overlaps(ob) for ob in placed):
            placed.append(candidate)
    return GridWorld(n, tuple(placed), config.seed, env_index)


def sample_endpoint_pairs(
    world: GridWorld,
    k: int,
    seed: int,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> list[tuple[Coord, Coord]]:
    """Draw ``k`` distinct-endpoint pairs that are far enough apart and connected.

    Pairs may repeat across draws; each pair gets its own budget of
    ``max_attempts`` rejections.
    """
    from gridbench.solvers import bfs_connected

    free = world.free_cells()
    if len(free) < 2:
        raise SamplingExhausted(
            f"{world.env_id} has {len(free)} free cells", env_index=world.env_index
        )
    threshold = min_pair_distance(world.n_size)
    rng = SplitMix64(seed)
    pairs: list[tuple[Coord, Coord]] = []
    for _ in range(k):
        for _attempt in range(max_attempts):
            a, b = rng.choice(free), rng.choice(free)
            if a == b or math.dist(a, b) < threshold:
                continue
            if bfs_connected(world, a, b):
                pairs.append((a, b))
                break
        else:
            raise SamplingExhausted(
                f"no valid pair in {world.env_id} after {max_attempts} attempts",
                env_index=world.env_index,
            )
    return pairs


def build_suite(config: SuiteConfig) -> list[tuple[GridWorld, list[TaskCase]]]:
    from gridbench.solvers import dijkstra_shortest

    config.validate()
    suite = []
    for env_index in range(config.envs_per_config):
        world = generate_environment(config, env_index)
        endpoint_seed = derive_seed(config.seed, config.n_size, env_index, "endpoints")
        pairs = sample_endpoint_pairs(
            world, config.pairs_per_env, endpoint_seed, config.max_attempts
        )
        cases = []
        for pair_index, (start, end) in enumerate(pairs):
            path = dijkstra_shortest(world, start, end)
            assert path is not None, "sampled pair must be connected"
            cases.append(
                TaskCase(
                    case_id=f"{world.env_id}-p{pair_index}",
                    env_ref=world.env_id,
                    start=start,
                    end=end,
                    reference_path=tuple(path),
                    optimal_len=len(path) - 1,
                )
            )
        suite.append((world, cases))
    return suite


# -- serialization -----------------------------------------------------------


def _xy(c: tuple[int, int]) -> list[int]:
    return [int(c[0]), int(c[1])]


def world_to_dict(world: GridWorld) -> dict[str, Any]:
    return {
        "env_id": world.env_id,
        "env_index": world.env_index,
        "n_size": world.n_size,
        "seed": world.seed,
        "obstacles": [[_xy(ob.top_left), _xy(ob.bottom_right)] for ob in world.obstacles],
    }


def world_from_dict(d: dict[str, Any]) -> GridWorld:
    return GridWorld.from_corners(
        d["n_size"], [(tl, br) for tl, br in d["obstacles"]], d.get("seed", 0), d.get("env_index", 0)
    )


def case_to_dict(case: TaskCase) -> dict[str, Any]:
    return {
        "case_id": case.case_id,
        "env_ref": case.env_ref,
        "start": _xy(case.start),
        "end": _xy(case.end),
        "reference_path": [_xy(c) for c in case.reference_path],
        "optimal_len": case.optimal_len,
    }


def case_from_dict(d: dict[str, Any]) -> TaskCase:
    return TaskCase(
        case_id=d["case_id"],
        env_ref=d["env_ref"],
        start=Coord(*d["start"]),
        end=Coord(*d["end"]),
        reference_path=tuple(Coord(*c) for c in d["reference_path"]),
        optimal_len=d["optimal_len"],
    )


def suite_to_json(config: SuiteConfig, suite: list[tuple[GridWorld, list[TaskCase]]]) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_dict(),
        "seed": config.seed,
        "environments": [world_to_dict(w) for w, _ in suite],
        "cases": [case_to_dict(c) for _, cases in suite for c in cases],
    }
    return json.dumps(doc, indent=1) + "\n"


def suite_from_json(text: str) -> tuple[SuiteConfig, list[tuple[GridWorld, list[TaskCase]]]]:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported suite schema_version {doc.get('schema_version')!r}")
    config = SuiteConfig(**doc["config"])
    worlds = [world_from_dict(d) for d in doc["environments"]]
    by_env: dict[str, list[TaskCase]] = {w.env_id: [] for w in worlds}
    for d in doc["cases"]:
        by_env[d["env_ref"]].append(case_from_dict(d))
    return config, [(w, by_env[w.env_id]) for w in worlds]
