"""Exit criteria for the package, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import json
import math
import random
import time
from pathlib import Path

import mpmath
import pytest

from gridbench.agents import AgentKind, scripted_agent
from gridbench.grid_world import (
    Coord,
    GridWorld,
    SuiteConfig,
    TaskCase,
    build_suite,
    generate_environment,
    min_pair_distance,
)
from gridbench.loopback import ChatStub
from gridbench.model_gateway import ModelEndpoint
from gridbench.path_eval import ErrorType, geometric_mean, mse, parse_path, validate
from gridbench.prompt_kit import PromptKind, render
from gridbench.runner import RunConfig, format_report, read_records, report, report_to_json, run_benchmark
from gridbench.solvers import (
    astar_shortest,
    bfs_connected,
    dfs_first_path,
    dijkstra_shortest,
    manhattan,
    path_length,
)

from .oracles import INF, euclid, free_mask, random_corners, walk_is_feasible, wavefront_distances

GOLDENS = Path(__file__).parent / "goldens"
DEFAULT_SIZES = (10, 20, 30)

ANCHORS = {
    PromptKind.VANILLA: "Please independently plan a continuous path",
    PromptKind.COT: "follow these steps step by step",
    PromptKind.FEWSHOT_BASE: "Plan the shortest path from the starting point",
    PromptKind.AOT_DFS: "(Right→Left→Down→Up)",
    PromptKind.AOT_ASTAR: "Manhattan distance",
    PromptKind.AOT_DIJKSTRA: "Use Dijkstra's algorithm to calculate",
    PromptKind.ALGO_DIRECT: "Use Dijkstra's algorithm to calculate",
    PromptKind.ALGO_REASONING: "Use Dijkstra's algorithm principles",
}


def default_suites() -> list[SuiteConfig]:
    return [SuiteConfig.for_size(n) for n in DEFAULT_SIZES]


def all_cases():
    for cfg in default_suites():
        for world, cases in build_suite(cfg):
            for case in cases:
                yield world, case


def case_lines(results: Path) -> list[dict]:
    return [r for r in read_records(results) if r["type"] == "case"]


def best_time(fn, repeats: int = 50) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


@pytest.mark.acceptance("AC1", "worked examples: lengths 7 and 8, each solver under 1 ms")
def test_ac1_worked_examples(example1, example2):
    for (world, case), expected in ((example1, 7), (example2, 8)):
        for solver in (dijkstra_shortest, astar_shortest):
            path = solver(world, case.start, case.end)
            assert path_length(path) == expected
            assert walk_is_feasible(10, [tuple(o) for o in world.obstacles], case.start, case.end, path)
            assert best_time(lambda: solver(world, case.start, case.end)) < 1e-3


@pytest.mark.acceptance("AC2", "solvers agree with a brute-force oracle on 500+ random worlds")
def test_ac2_solver_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(20240601)
    worlds = checked = unreachable = 0
    while worlds < 600:
        n = rng.randint(2, 12)
        if worlds % 2:
            corners = random_corners(rng, n, rng.randint(0, 6), max(1, n // 2))
            world = GridWorld.from_corners(n, corners)
        else:
            side = rng.randint(1, max(1, n // 3))
            count = rng.randint(0, max(0, min(4, (n * n) // (side * side) // 3)))
            world = generate_environment(SuiteConfig(n, count, side, seed=rng.getrandbits(32)), worlds)
            corners = [tuple(o) for o in world.obstacles]
        free = world.free_cells()
        if len(free) < 2:
            continue
        worlds += 1
        mask = free_mask(n, corners)
        for source in rng.sample(free, min(3, len(free))):
            dist = wavefront_distances(mask, source)
            cut_off = [t for t in free if dist[t] >= INF]
            for target in rng.sample(free, min(12, len(free))) + cut_off[:4]:
                assert bfs_connected(world, source, target) == (dist[target] < INF)
            for target in rng.sample(free, min(8, len(free))):
                dij, ast, dfs = (f(world, source, target) for f in (dijkstra_shortest, astar_shortest, dfs_first_path))
                if dist[target] >= INF:
                    unreachable += 1
                    assert dij is None and ast is None and dfs is None
                    continue
                checked += 1
                assert path_length(dij) == path_length(ast) == dist[target]
                for p in (dij, ast, dfs):
                    assert walk_is_feasible(n, corners, source, target, p)
                v = validate(world, _case(world, source, target, int(dist[target])), dfs)
                assert v.feasible
    assert checked > 4000 and unreachable > 0
    assert time.perf_counter() - t0 < 30


def _case(world, start, end, optimal_len):
    return TaskCase("ac2", world.env_id, Coord(*start), Coord(*end), (), optimal_len)


@pytest.mark.acceptance("AC3", "oracle agent scores 100/100/100, GM 100, MSE 0 on the default suite")
def test_ac3_oracle_closure(tmp_path):
    t0 = time.perf_counter()
    config = RunConfig(default_suites(), [PromptKind.AOT_DIJKSTRA], agent=AgentKind.ORACLE, output_dir=tmp_path)
    groups = report(run_benchmark(config))
    elapsed = time.perf_counter() - t0
    assert sorted(g.n_size for g in groups) == list(DEFAULT_SIZES)
    for g in groups:
        m = g.metrics
        assert m.n_cases == 100
        assert (m.CR, m.FR, m.OR) == (100, 100, 100)
        assert abs(m.gm_reported - 100.0) <= 1e-9
        assert m.MSE == 0
    assert elapsed < 10


def _selected(kind: AgentKind, case) -> bool:
    if kind is AgentKind.DIAGONAL_CHEAT:
        return case.start.x != case.end.x and case.start.y != case.end.y
    if kind is AgentKind.GREEDY_MANHATTAN:
        return case.optimal_len > manhattan(case.start, case.end)
    return True


@pytest.mark.acceptance("AC4", "each fault agent hits its designated error class on every selected case")
def test_ac4_error_taxonomy():
    designated = {
        AgentKind.SILENT: ErrorType.EMPTY_PATH,
        AgentKind.DIAGONAL_CHEAT: ErrorType.INVALID_STEP_DISTANCE,
        AgentKind.WALL_WALKER: ErrorType.OUT_OF_BOUNDS,
        AgentKind.OFFSET_ENDPOINT: ErrorType.START_END_MISMATCH,
        AgentKind.GREEDY_MANHATTAN: ErrorType.PATH_THROUGH_OBSTACLE,
    }
    seen: set[ErrorType] = set()
    cases = list(all_cases())
    for kind, error in designated.items():
        selected = [(w, c) for w, c in cases if _selected(kind, c)]
        assert len(selected) >= 20, kind
        for world, case in selected:
            v = validate(world, case, parse_path(scripted_agent(kind, world, case)))
            assert v.primary_error is error, (kind, case.case_id, v.primary_error)
            seen.add(v.primary_error)
    assert seen == set(ErrorType)


@pytest.mark.acceptance("AC5", "1,000 pairs per size satisfy distance, connectivity and obstacle rules")
def test_ac5_generation_constraints():
    t0 = time.perf_counter()
    for n in DEFAULT_SIZES:
        cfg = SuiteConfig.for_size(n, envs_per_config=200, pairs_per_env=5)
        pairs = 0
        for world, cases in build_suite(cfg):
            corners = [tuple(o) for o in world.obstacles]
            cell_sets = []
            for (x1, y1), (x2, y2) in corners:
                assert x2 - x1 + 1 == cfg.obstacle_side and y2 - y1 + 1 == cfg.obstacle_side
                cells = {(x, y) for x in range(x1, x2 + 1) for y in range(y1, y2 + 1)}
                assert all(0 <= x < n and 0 <= y < n for x, y in cells)
                cell_sets.append(cells)
            assert len(cell_sets) == cfg.n_obstacles
            union = set().union(*cell_sets)
            assert len(union) == cfg.n_obstacles * cfg.obstacle_side**2
            mask = free_mask(n, corners)
            for case in cases:
                pairs += 1
                assert euclid(case.start, case.end) >= min_pair_distance(n)
                assert tuple(case.start) not in union and tuple(case.end) not in union
                d = wavefront_distances(mask, tuple(case.start))[tuple(case.end)]
                assert d < INF and d == case.optimal_len
        assert pairs == 1000
    assert time.perf_counter() - t0 < 60


@pytest.mark.acceptance("AC6", "GM and MSE match high-precision evaluation; OR <= FR <= CR")
def test_ac6_metric_formulas(tmp_path):
    mpmath.mp.dps = 40
    rng = random.Random(6)
    for _ in range(10_000):
        k = rng.randint(1, 40)
        pairs = []
        for _ in range(k):
            opt = rng.randint(1, 120)
            pairs.append((opt + rng.choice([0, 0, rng.randint(0, 80)]), opt))
        ref_gm = mpmath.exp(mpmath.fsum(mpmath.log(mpmath.mpf(g) / o) for g, o in pairs) / k)
        ref_mse = mpmath.fsum((mpmath.mpf(g) - o) ** 2 for g, o in pairs) / k
        assert abs(geometric_mean(pairs) - ref_gm) <= 1e-9 * ref_gm
        assert abs(mse(pairs) - ref_mse) <= 1e-9 * max(ref_mse, 1)
    assert geometric_mean([(9, 7)]) == pytest.approx(9 / 7, rel=1e-15)

    groups = []
    for kind in (AgentKind.RANDOM_WALK, AgentKind.GREEDY_MANHATTAN, AgentKind.ORACLE, AgentKind.WALL_WALKER):
        config = RunConfig(default_suites(), [PromptKind.COT], agent=kind, output_dir=tmp_path)
        groups = report(run_benchmark(config))
    assert len(groups) == 4 * len(DEFAULT_SIZES)
    for g in groups:
        assert 0 <= g.metrics.OR <= g.metrics.FR <= g.metrics.CR <= 100


@pytest.mark.acceptance("AC7", "eight prompt renders match goldens byte-for-byte and carry anchors")
def test_ac7_template_goldens(example1):
    assert set(ANCHORS) == set(PromptKind)
    for kind, anchor in ANCHORS.items():
        golden = (GOLDENS / f"{kind.value}.txt").read_bytes()
        rendered = render(kind, *example1).text.encode("utf-8")
        assert rendered == golden, kind
        assert anchor.encode("utf-8") in golden, kind


@pytest.mark.acceptance("AC8", "loopback HTTP run reproduces direct verdicts and the report")
def test_ac8_loopback_end_to_end(tmp_path):
    agent = AgentKind.GREEDY_MANHATTAN
    kind = PromptKind.AOT_ASTAR
    replies: dict[str, str] = {}
    for world, case in all_cases():
        replies[render(kind, world, case).text] = scripted_agent(agent, world, case)

    direct = run_benchmark(RunConfig(default_suites(), [kind], agent=agent, output_dir=tmp_path / "direct"))
    with ChatStub(replies.__getitem__, faults=[429, 503, 500]) as stub:
        endpoint = ModelEndpoint(stub.base_url, "loopback-greedy", parallelism=8, backoff_s=0.01, timeout_s=10)
        remote_dir = tmp_path / "loopback"
        remote = run_benchmark(RunConfig(default_suites(), [kind], endpoint=endpoint, output_dir=remote_dir))
    assert stub.requests == 300 + 3

    by_key = lambda path: {(r["case_id"], r["prompt_kind"]): r for r in case_lines(path)}  # noqa: E731
    d, r = by_key(direct), by_key(remote)
    assert len(d) == len(r) == 300 and d.keys() == r.keys()
    for key in d:
        assert r[key]["verdict"] == d[key]["verdict"], key
        assert r[key]["reply"] == d[key]["reply"]
        assert not r[key]["failed"]

    groups = report(remote)
    assert json.loads((remote_dir / "report.json").read_text()) == report_to_json(groups)
    assert (remote_dir / "report.txt").read_text() == format_report(groups)
    # Recount from the raw lines without going through the aggregator.
    for g in groups:
        rows = [x for x in r.values() if x["n_size"] == g.n_size]
        feas = [x for x in rows if x["verdict"]["feasible"]]
        assert g.metrics.CR == 100 * sum(x["verdict"]["compliant"] for x in rows) / len(rows)
        assert g.metrics.FR == 100 * len(feas) / len(rows)
        assert g.metrics.OR == 100 * sum(x["verdict"]["optimal"] for x in rows) / len(rows)
        ratios = [x["verdict"]["gen_len"] / x["optimal_len"] for x in feas]
        assert g.metrics.GM == pytest.approx(math.exp(sum(map(math.log, ratios)) / len(ratios)), rel=1e-12)
        sq = [(x["verdict"]["gen_len"] - x["optimal_len"]) ** 2 for x in feas]
        assert g.metrics.MSE == pytest.approx(sum(sq) / len(sq), rel=1e-12)


@pytest.mark.acceptance("AC9", "repeated runs give identical suites, verdicts and SVGs")
def test_ac9_determinism(tmp_path):
    def execute(out: Path) -> Path:
        config = RunConfig(
            [SuiteConfig.for_size(n, seed=99) for n in DEFAULT_SIZES],
            [PromptKind.AOT_DFS],
            agent=AgentKind.RANDOM_WALK,
            agent_seed=5,
            output_dir=out,
            render_svg=True,
        )
        return run_benchmark(config)

    a, b = execute(tmp_path / "a"), execute(tmp_path / "b")
    for n in DEFAULT_SIZES:
        name = f"suite_N{n}.json"
        assert (a.parent / name).read_bytes() == (b.parent / name).read_bytes()

    def stable(path: Path) -> list[dict]:
        return [{k: v for k, v in rec.items() if k != "latency_s"} for rec in case_lines(path)]

    assert stable(a) == stable(b)
    svgs_a = sorted(p.name for p in (a.parent / "svg").iterdir())
    assert len(svgs_a) == 300
    assert svgs_a == sorted(p.name for p in (b.parent / "svg").iterdir())
    for name in svgs_a:
        assert (a.parent / "svg" / name).read_bytes() == (b.parent / "svg" / name).read_bytes()
