"""Reference pathfinding on 4-connected unit-cost grids.

All solvers return a list of :class:`Coord` from start to end inclusive, or
``None`` when the endpoints are disconnected. ``start == end`` yields the
single-point path.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from typing import Iterator, Sequence

from gridbench.errors import InvalidEndpoint
from gridbench.grid_world import Coord, GridWorld, in_bounds, is_obstacle

Path = list[Coord]

# Right, Left, Down, Up. Neighbor expansion order for every solver.
MOVE_ORDER: tuple[tuple[int, int], ...] = ((0, 1), (0, -1), (1, 0), (-1, 0))
MOVE_NAMES = ("Right", "Left", "Down", "Up")


def manhattan(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def path_length(p: Sequence[tuple[int, int]]) -> int:
    """Number of unit moves in a non-empty path."""
    if not p:
        raise ValueError("path_length of an empty path")
    return len(p) - 1


def passable(world: GridWorld, c: tuple[int, int]) -> bool:
    return in_bounds(world, c) and not is_obstacle(world, c)


def neighbors(world: GridWorld, c: tuple[int, int]) -> Iterator[Coord]:
    for dx, dy in MOVE_ORDER:
        nxt = Coord(c[0] + dx, c[1] + dy)
        if passable(world, nxt):
            yield nxt


def _check_endpoints(world: GridWorld, *cells: tuple[int, int]) -> None:
    for c in cells:
        if not in_bounds(world, c):
            raise InvalidEndpoint(f"{tuple(c)} is outside the {world.n_size}x{world.n_size} grid")
        if is_obstacle(world, c):
            raise InvalidEndpoint(f"{tuple(c)} lies inside an obstacle")


def _trace(parent: dict[Coord, Coord], end: Coord) -> Path:
    path = [end]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _best_first(world: GridWorld, start: Coord, end: Coord, heuristic) -> Path | None:
    # Ties on priority pop in insertion order via the counter.
    counter = itertools.count()
    dist = {start: 0}
    parent: dict[Coord, Coord] = {}
    frontier = [(heuristic(start), next(counter), start)]
    closed: set[Coord] = set()
    while frontier:
        _, _, cell = heapq.heappop(frontier)
        if cell in closed:
            continue
        if cell == end:
            return _trace(parent, end)
        closed.add(cell)
        for nxt in neighbors(world, cell):
            tentative = dist[cell] + 1
            if tentative < dist.get(nxt, tentative + 1):
                dist[nxt] = tentative
                parent[nxt] = cell
                heapq.heappush(frontier, (tentative + heuristic(nxt), next(counter), nxt))
    return None


def dijkstra_shortest(world: GridWorld, start: tuple[int, int], end: tuple[int, int]) -> Path | None:
    start, end = Coord(*start), Coord(*end)
    _check_endpoints(world, start, end)
    return _best_first(world, start, end, lambda c: 0)


def astar_shortest(world: GridWorld, start: tuple[int, int], end: tuple[int, int]) -> Path | None:
    """A* with the Manhattan heuristic; goal test on pop."""
    start, end = Coord(*start), Coord(*end)
    _check_endpoints(world, start, end)
    return _best_first(world, start, end, lambda c: manhattan(c, end))


def dfs_first_path(world: GridWorld, start: tuple[int, int], end: tuple[int, int]) -> Path | None:
    """Stack-based DFS, visit-on-pop, neighbors pushed Right, Left, Down, Up.

    The last pushed neighbor (Up) is explored first. Returns the first path
    that pops the endpoint, which is usually not the shortest.
    """
    start, end = Coord(*start), Coord(*end)
    _check_endpoints(world, start, end)
    stack: list[tuple[Coord, Path]] = [(start, [start])]
    visited: set[Coord] = set()
    while stack:
        cell, path = stack.pop()
        if cell == end:
            return path
        if cell in visited:
            continue
        visited.add(cell)
        for nxt in neighbors(world, cell):
            if nxt not in visited:
                stack.append((nxt, path + [nxt]))
    return None


def bfs_connected(world: GridWorld, a: tuple[int, int], b: tuple[int, int]) -> bool:
    a, b = Coord(*a), Coord(*b)
    _check_endpoints(world, a, b)
    seen = {a}
    queue = deque([a])
    while queue:
        cell = queue.popleft()
        if cell == b:
            return True
        for nxt in neighbors(world, cell):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False
