"""Reply parsing, route validation, failure classification and metrics."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from statistics import fmean
from typing import Any, Iterable, Sequence

from gridbench.errors import UndefinedMetric
from gridbench.grid_world import Coord, GridWorld, TaskCase, in_bounds, is_obstacle


class ErrorType(str, Enum):
    # Declaration order is the primary-error precedence.
    EMPTY_PATH = "empty_path"
    START_END_MISMATCH = "start_end_mismatch"
    INVALID_STEP_DISTANCE = "invalid_step_distance"
    OUT_OF_BOUNDS = "out_of_bounds"
    PATH_THROUGH_OBSTACLE = "path_through_obstacle"


PRECEDENCE: tuple[ErrorType, ...] = tuple(ErrorType)
_COMPLIANCE_ERRORS = frozenset(
    {ErrorType.EMPTY_PATH, ErrorType.START_END_MISMATCH, ErrorType.INVALID_STEP_DISTANCE}
)

_PAIR = r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)"
_PATH_LIST = re.compile(
    r"\[\s*(?:\(\s*-?\d+\s*,\s*-?\d+\s*\)(?:\s*,\s*\(\s*-?\d+\s*,\s*-?\d+\s*\))*\s*,?)?\s*\]"
)
_PAIR_RE = re.compile(_PAIR)


@dataclass(frozen=True)
class CandidatePath:
    points: tuple[Coord, ...]
    raw_text: str = ""


def format_path(points: Iterable[tuple[int, int]]) -> str:
    return "[" + ", ".join(f"({x}, {y})" for x, y in points) + "]"


def parse_path(text: str) -> CandidatePath:
    """Take the last bracketed list of integer pairs in ``text``.

    Anything else (prose only, nested obstacle lists, ``[]``) yields an empty
    path, which validation reports as ``empty_path``.
    """
    matches = list(_PATH_LIST.finditer(text or ""))
    if not matches:
        return CandidatePath((), text or "")
    last = matches[-1].group(0)
    points = tuple(Coord(int(x), int(y)) for x, y in _PAIR_RE.findall(last))
    return CandidatePath(points, text)


@dataclass(frozen=True)
class Verdict:
    compliant: bool
    feasible: bool
    optimal: bool
    error_flags: frozenset[ErrorType]
    primary_error: ErrorType | None
    gen_len: int | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "compliant": self.compliant,
            "feasible": self.feasible,
            "optimal": self.optimal,
            "error_flags": [e.value for e in PRECEDENCE if e in self.error_flags],
            "primary_error": self.primary_error.value if self.primary_error else None,
            "gen_len": self.gen_len,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Verdict:
        primary = d.get("primary_error")
        return cls(
            compliant=d["compliant"],
            feasible=d["feasible"],
            optimal=d["optimal"],
            error_flags=frozenset(ErrorType(e) for e in d["error_flags"]),
            primary_error=ErrorType(primary) if primary else None,
            gen_len=d["gen_len"],
        )


def validate(world: GridWorld, case: TaskCase, cand: CandidatePath | Sequence[tuple[int, int]]) -> Verdict:
    points = cand.points if isinstance(cand, CandidatePath) else tuple(cand)
    if not points:
        flags = frozenset({ErrorType.EMPTY_PATH})
        return Verdict(False, False, False, flags, ErrorType.EMPTY_PATH, None)

    flags = set()
    if tuple(points[0]) != tuple(case.start) or tuple(points[-1]) != tuple(case.end):
        flags.add(ErrorType.START_END_MISMATCH)
    if any(abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1 for a, b in zip(points, points[1:])):
        flags.add(ErrorType.INVALID_STEP_DISTANCE)
    if any(not in_bounds(world, p) for p in points):
        flags.add(ErrorType.OUT_OF_BOUNDS)
    if any(is_obstacle(world, p) for p in points):
        flags.add(ErrorType.PATH_THROUGH_OBSTACLE)

    gen_len = len(points) - 1
    compliant = not (flags & _COMPLIANCE_ERRORS)
    feasible = not flags
    optimal = feasible and gen_len == case.optimal_len
    primary = next((e for e in PRECEDENCE if e in flags), None)
    return Verdict(compliant, feasible, optimal, frozenset(flags), primary, gen_len)


def geometric_mean(pairs: Sequence[tuple[int, int]]) -> float:
    """``exp(mean(log(gen / opt)))``; a (0, 0) pair counts as ratio 1."""
    if not pairs:
        raise UndefinedMetric("geometric mean of no routes")
    logs = []
    for gen, opt in pairs:
        if gen == 0 and opt == 0:
            logs.append(0.0)
        elif gen <= 0 or opt <= 0:
            raise UndefinedMetric(f"non-positive route length in pair ({gen}, {opt})")
        else:
            logs.append(math.log(gen / opt))
    return math.exp(math.fsum(logs) / len(logs))


def mse(pairs: Sequence[tuple[int, int]]) -> float:
    if not pairs:
        raise UndefinedMetric("mean squared error of no routes")
    return math.fsum((gen - opt) ** 2 for gen, opt in pairs) / len(pairs)


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    verdict: Verdict
    optimal_len: int
    latency_s: float
    prompt_kind: str
    model_id: str
    n_size: int = 0


@dataclass(frozen=True)
class AggregateMetrics:
    """Group metrics. CR/FR/OR are percentages; GM is the raw ratio.

    GM and MSE are taken over feasible routes only and are ``None`` when the
    group has none.
    """

    CR: float
    FR: float
    OR: float
    GM: float | None
    MSE: float | None
    RT: float
    n_cases: int

    @property
    def gm_reported(self) -> float | None:
        return None if self.GM is None else self.GM * 100.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "CR": self.CR,
            "FR": self.FR,
            "OR": self.OR,
            "GM": self.gm_reported,
            "MSE": self.MSE,
            "RT": self.RT,
            "n_cases": self.n_cases,
        }


def aggregate(results: Sequence[CaseResult]) -> AggregateMetrics:
    if not results:
        raise UndefinedMetric("cannot aggregate an empty result set")
    n = len(results)
    n_comp = sum(r.verdict.compliant for r in results)
    n_feas = sum(r.verdict.feasible for r in results)
    n_optm = sum(r.verdict.optimal for r in results)
    pairs = [(r.verdict.gen_len, r.optimal_len) for r in results if r.verdict.feasible]
    try:
        gm = geometric_mean(pairs)
    except UndefinedMetric:
        gm = None
    m = mse(pairs) if pairs else None
    return AggregateMetrics(
        CR=100.0 * n_comp / n,
        FR=100.0 * n_feas / n,
        OR=100.0 * n_optm / n,
        GM=gm,
        MSE=m,
        RT=fmean(r.latency_s for r in results),
        n_cases=n,
    )
