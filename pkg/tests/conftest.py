from __future__ import annotations

import pytest

from gridbench.grid_world import Coord, GridWorld, TaskCase

EXAMPLE1_CORNERS = [((1, 2), (3, 4)), ((2, 5), (4, 6))]
EXAMPLE1_PATH = [(3, 7), (4, 7), (5, 7), (5, 6), (5, 5), (5, 4), (5, 3), (4, 3)]
EXAMPLE2_CORNERS = [((3, 4), (5, 6))]
EXAMPLE2_PATH = [(2, 4), (2, 3), (3, 3), (4, 3), (5, 3), (6, 3), (7, 3), (7, 4), (7, 5)]

_acceptance: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(code, title): exit criterion")


def _make_case(world: GridWorld, start, end, path, case_id: str) -> TaskCase:
    return TaskCase(
        case_id=case_id,
        env_ref=world.env_id,
        start=Coord(*start),
        end=Coord(*end),
        reference_path=tuple(Coord(*p) for p in path),
        optimal_len=len(path) - 1,
    )


@pytest.fixture
def example1():
    world = GridWorld.from_corners(10, EXAMPLE1_CORNERS)
    return world, _make_case(world, (3, 7), (4, 3), EXAMPLE1_PATH, "example-1")


@pytest.fixture
def example2():
    world = GridWorld.from_corners(10, EXAMPLE2_CORNERS)
    return world, _make_case(world, (2, 4), (7, 5), EXAMPLE2_PATH, "example-2")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    code, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
        if _acceptance.get(code, ("",))[0] != "FAIL":
            _acceptance[code] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for code in sorted(_acceptance, key=lambda c: int(c[2:])):
        status, title = _acceptance[code]
        terminalreporter.write_line(f"{code} {status}  {title}")
