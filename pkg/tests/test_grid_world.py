import math
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridbench.errors import ConfigError, PlacementExhausted, SamplingExhausted
from gridbench.grid_world import (
    Coord,
    GridWorld,
    Obstacle,
    SuiteConfig,
    build_suite,
    generate_environment,
    in_bounds,
    is_obstacle,
    min_pair_distance,
    sample_endpoint_pairs,
    suite_from_json,
    suite_to_json,
)
from gridbench.rng import SplitMix64, derive_seed

from .oracles import euclid, oracle_len


def brute_cells(ob: Obstacle) -> set[tuple[int, int]]:
    (x1, y1), (x2, y2) = ob
    return {(x, y) for x in range(x1, x2 + 1) for y in range(y1, y2 + 1)}


def check_world(world: GridWorld, n_obstacles: int, side: int) -> None:
    assert len(world.obstacles) == n_obstacles
    cell_sets = [brute_cells(ob) for ob in world.obstacles]
    for ob, cells in zip(world.obstacles, cell_sets):
        assert ob.bottom_right.x - ob.top_left.x == side - 1
        assert ob.bottom_right.y - ob.top_left.y == side - 1
        assert all(0 <= x < world.n_size and 0 <= y < world.n_size for x, y in cells)
    for a, b in combinations(cell_sets, 2):
        assert not a & b
    assert sum(map(len, cell_sets)) == n_obstacles * side * side


def test_splitmix_reference_values():
    # First outputs of SplitMix64 seeded with 0, from the published reference
    # implementation (Steele, Lea & Flood; also java.util.SplittableRandom).
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4
    assert rng.next_u64() == 0x06C45D188009454F


def test_rng_streams_are_independent_of_each_other():
    assert derive_seed(1, 10, 0, "obstacles") != derive_seed(1, 10, 0, "endpoints")
    assert derive_seed(1, 10, 0, "obstacles") == derive_seed(1, 10, 0, "obstacles")


def test_below_is_in_range():
    rng = SplitMix64(3)
    draws = [rng.below(7) for _ in range(2000)]
    assert set(draws) == set(range(7))


def test_generate_small_preset():
    world = generate_environment(SuiteConfig(10, 2, 3, seed=7), 0)
    check_world(world, 2, 3)
    assert all(len(brute_cells(ob)) == 9 for ob in world.obstacles)


def test_generate_fills_whole_grid_then_sampling_fails():
    world = generate_environment(SuiteConfig(3, 1, 3, seed=0), 0)
    assert world.obstacles == (Obstacle(Coord(0, 0), Coord(2, 2)),)
    with pytest.raises(SamplingExhausted):
        sample_endpoint_pairs(world, 1, seed=0)


def test_generate_many_worlds_disjoint():
    cfg = SuiteConfig(20, 3, 4, seed=7)
    for idx in range(100):
        check_world(generate_environment(cfg, idx), 3, 4)


def test_generate_is_deterministic():
    cfg = SuiteConfig(30, 4, 5, seed=11)
    assert generate_environment(cfg, 5) == generate_environment(cfg, 5)
    assert generate_environment(cfg, 5) != generate_environment(cfg, 6)


def test_placement_exhausted():
    # Two 3x3 squares fit by area on a 5x5 grid but can never be disjoint.
    with pytest.raises(PlacementExhausted) as info:
        generate_environment(SuiteConfig(5, 2, 3, max_attempts=200), 3)
    assert info.value.env_index == 3


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_size=0, n_obstacles=0, obstacle_side=1), dict(n_size=5, n_obstacles=1, obstacle_side=6),
     dict(n_size=5, n_obstacles=3, obstacle_side=3), dict(n_size=5, n_obstacles=-1, obstacle_side=1)],
)
def test_invalid_configs(kwargs):
    with pytest.raises(ConfigError):
        SuiteConfig(**kwargs).validate()


def test_is_obstacle_examples(example1):
    world, _ = example1
    assert is_obstacle(world, (2, 3))
    assert not is_obstacle(world, (5, 4))
    assert is_obstacle(world, (1, 2))  # top-left corner itself
    assert is_obstacle(world, (4, 6))  # bottom-right corner
    assert not is_obstacle(world, (-1, 3))


def test_in_bounds_examples():
    world = GridWorld(10)
    assert not in_bounds(world, (3, 10))
    assert in_bounds(world, (0, 0))
    assert in_bounds(world, (9, 9))
    assert not in_bounds(world, (-1, 0))


def test_distance_threshold():
    # 0.3 * sqrt(2) * 9, and the (0,0)-(2,2) pair falls short of it.
    assert min_pair_distance(10) == pytest.approx(3.8183766184073564, rel=1e-15)
    assert euclid((0, 0), (2, 2)) == pytest.approx(2.8284271247461903)
    assert euclid((0, 0), (2, 2)) < min_pair_distance(10)
    assert euclid((3, 7), (4, 3)) == pytest.approx(math.sqrt(17))
    assert euclid((3, 7), (4, 3)) >= min_pair_distance(10)


def test_example1_pair_is_connected(example1):
    world, _ = example1
    assert oracle_len(10, [tuple(ob) for ob in world.obstacles], (3, 7), (4, 3)) == 7


def test_enclosed_start_is_never_sampled():
    # Cell (0,0) is walled off by obstacles at (0,1) and (1,0).
    world = GridWorld.from_corners(10, [((0, 1), (0, 1)), ((1, 0), (1, 0))])
    pairs = sample_endpoint_pairs(world, 200, seed=5)
    assert all(Coord(0, 0) not in pair for pair in pairs)


def test_sampled_pairs_satisfy_constraints():
    cfg = SuiteConfig.for_size(20, seed=3)
    for idx in range(10):
        world = generate_environment(cfg, idx)
        corners = [tuple(ob) for ob in world.obstacles]
        for a, b in sample_endpoint_pairs(world, 5, seed=idx):
            assert a != b
            assert not is_obstacle(world, a) and not is_obstacle(world, b)
            assert euclid(a, b) >= min_pair_distance(20)
            assert oracle_len(20, corners, a, b) is not None


def test_build_suite_counts_and_references():
    cfg = SuiteConfig.for_size(10)
    suite = build_suite(cfg)
    assert len(suite) == 20
    assert all(len(cases) == 5 for _, cases in suite)
    assert sum(len(cases) for _, cases in suite) == 100
    ids = [c.case_id for _, cases in suite for c in cases]
    assert len(set(ids)) == 100
    for world, cases in suite:
        corners = [tuple(ob) for ob in world.obstacles]
        for case in cases:
            assert case.env_ref == world.env_id
            assert case.optimal_len == len(case.reference_path) - 1
            assert case.optimal_len == oracle_len(10, corners, case.start, case.end)


def test_more_pairs_do_not_move_obstacles():
    a = build_suite(SuiteConfig.for_size(10, pairs_per_env=5, envs_per_config=3))
    b = build_suite(SuiteConfig.for_size(10, pairs_per_env=7, envs_per_config=3))
    assert [w for w, _ in a] == [w for w, _ in b]
    assert [c.start for c in a[0][1]] == [c.start for c in b[0][1][:5]]


def test_suite_serialization_is_stable_and_round_trips():
    cfg = SuiteConfig.for_size(20, envs_per_config=4)
    text1 = suite_to_json(cfg, build_suite(cfg))
    text2 = suite_to_json(cfg, build_suite(cfg))
    assert text1 == text2
    cfg2, suite2 = suite_from_json(text1)
    assert cfg2 == cfg
    assert suite_to_json(cfg2, suite2) == text1


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), idx=st.integers(0, 50), n=st.sampled_from([10, 20, 30]))
def test_generated_world_invariants_property(seed, idx, n):
    cfg = SuiteConfig.for_size(n, seed=seed)
    check_world(generate_environment(cfg, idx), cfg.n_obstacles, cfg.obstacle_side)
