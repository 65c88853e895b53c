"""Deterministic in-process planners that stand in for a remote model.

Each non-oracle agent is built to trigger one failure class:

==================  ==========================================================
oracle              Dijkstra path, always optimal
greedy_manhattan    distance-reducing walk that cuts through obstacles when
                    boxed in (path_through_obstacle on obstructed cases)
random_walk         bounded random legal walk, usually ends elsewhere
                    (start_end_mismatch)
diagonal_cheat      shortest 8-connected path (invalid_step_distance whenever
                    start and end differ on both axes)
silent              ``[]`` (empty_path)
offset_endpoint     reference path missing its last cell (start_end_mismatch)
wall_walker         leaves the grid over the top edge and comes back
                    (out_of_bounds)
==================  ==========================================================
"""

from __future__ import annotations

from collections import deque
from enum import Enum

from gridbench.errors import UnknownKind
from gridbench.grid_world import Coord, GridWorld, TaskCase
from gridbench.path_eval import ErrorType, format_path
from gridbench.rng import SplitMix64
from gridbench.solvers import MOVE_ORDER, dijkstra_shortest, manhattan, passable

_DIAGONALS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class AgentKind(str, Enum):
    ORACLE = "oracle"
    GREEDY_MANHATTAN = "greedy_manhattan"
    RANDOM_WALK = "random_walk"
    DIAGONAL_CHEAT = "diagonal_cheat"
    SILENT = "silent"
    OFFSET_ENDPOINT = "offset_endpoint"
    WALL_WALKER = "wall_walker"

    @classmethod
    def parse(cls, name: str | AgentKind) -> AgentKind:
        if isinstance(name, AgentKind):
            return name
        key = str(name).strip().lower().replace("-", "_")
        for kind in cls:
            if key in (kind.value, kind.value.replace("_", "")):
                return kind
        raise UnknownKind(f"unknown agent kind {name!r}")


# The failure class each fault agent is designed to produce.
DESIGNATED_ERROR: dict[AgentKind, ErrorType] = {
    AgentKind.GREEDY_MANHATTAN: ErrorType.PATH_THROUGH_OBSTACLE,
    AgentKind.RANDOM_WALK: ErrorType.START_END_MISMATCH,
    AgentKind.DIAGONAL_CHEAT: ErrorType.INVALID_STEP_DISTANCE,
    AgentKind.SILENT: ErrorType.EMPTY_PATH,
    AgentKind.OFFSET_ENDPOINT: ErrorType.START_END_MISMATCH,
    AgentKind.WALL_WALKER: ErrorType.OUT_OF_BOUNDS,
}


def greedy_walk(world: GridWorld, start: Coord, end: Coord) -> list[Coord]:
    path = [start]
    cur = start
    while cur != end:
        closer = [
            Coord(cur.x + dx, cur.y + dy)
            for dx, dy in MOVE_ORDER
            if manhattan((cur.x + dx, cur.y + dy), end) < manhattan(cur, end)
        ]
        cur = next((c for c in closer if passable(world, c)), closer[0])
        path.append(cur)
    return path


def random_walk(world: GridWorld, start: Coord, end: Coord, rng: SplitMix64) -> list[Coord]:
    path = [start]
    cur = start
    for _ in range(2 * world.n_size):
        options = [Coord(cur.x + dx, cur.y + dy) for dx, dy in MOVE_ORDER]
        options = [c for c in options if passable(world, c)]
        if not options:
            break
        cur = rng.choice(options)
        path.append(cur)
        if cur == end:
            break
    return path


def eight_connected_shortest(world: GridWorld, start: Coord, end: Coord) -> list[Coord] | None:
    """BFS with diagonal moves allowed, corner cutting included."""
    moves = _DIAGONALS + MOVE_ORDER
    parent: dict[Coord, Coord | None] = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == end:
            path = [cur]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for dx, dy in moves:
            nxt = Coord(cur.x + dx, cur.y + dy)
            if nxt not in parent and passable(world, nxt):
                parent[nxt] = cur
                queue.append(nxt)
    return None


def wall_walk(start: Coord, end: Coord) -> list[Coord]:
    """Up to row -1, along it to the target column, then down to the end."""
    path = [Coord(x, start.y) for x in range(start.x, -2, -1)]
    step = 1 if end.y >= start.y else -1
    path += [Coord(-1, y) for y in range(start.y + step, end.y + step, step)]
    path += [Coord(x, end.y) for x in range(0, end.x + 1)]
    return path


def scripted_agent(kind: AgentKind | str, world: GridWorld, case: TaskCase, seed: int = 0) -> str:
    """Reply text the given agent would send for ``case``."""
    kind = AgentKind.parse(kind)
    start, end = Coord(*case.start), Coord(*case.end)
    if kind is AgentKind.SILENT:
        return "[]"
    if kind is AgentKind.ORACLE:
        path = dijkstra_shortest(world, start, end)
        return format_path(path) if path else "[]"
    if kind is AgentKind.OFFSET_ENDPOINT:
        return format_path(case.reference_path[:-1])
    if kind is AgentKind.GREEDY_MANHATTAN:
        return format_path(greedy_walk(world, start, end))
    if kind is AgentKind.RANDOM_WALK:
        rng = SplitMix64.stream(seed, case.case_id, "random_walk")
        return format_path(random_walk(world, start, end, rng))
    if kind is AgentKind.DIAGONAL_CHEAT:
        path = eight_connected_shortest(world, start, end)
        return format_path(path) if path else "[]"
    if kind is AgentKind.WALL_WALKER:
        return format_path(wall_walk(start, end))
    raise UnknownKind(f"unhandled agent kind {kind!r}")
