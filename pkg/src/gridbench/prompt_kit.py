"""Prompt strategies rendered from a (world, case) pair.

Templates live in ``gridbench/templates/<kind>.txt``. Leading lines starting
with ``## `` are an asset header (normalization notes) and are not part of the
prompt. Placeholders are ``{obstacles}``, ``{start_x}``, ``{start_y}``,
``{end_x}`` and ``{end_y}``; substitution is plain text replacement, so no
other brace in a template is special.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from gridbench.errors import UnknownKind
from gridbench.grid_world import GridWorld, TaskCase

PLACEHOLDERS = ("{obstacles}", "{start_x}", "{start_y}", "{end_x}", "{end_y}")


class PromptKind(str, Enum):
    VANILLA = "vanilla"
    COT = "cot"
    FEWSHOT_BASE = "fewshot_base"
    AOT_DFS = "aot_dfs"
    AOT_ASTAR = "aot_astar"
    AOT_DIJKSTRA = "aot_dijkstra"
    ALGO_DIRECT = "algo_direct"
    ALGO_REASONING = "algo_reasoning"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, name: str | PromptKind) -> PromptKind:
        """Accept an enum value, member name or display label, case-insensitively."""
        if isinstance(name, PromptKind):
            return name
        key = str(name).strip().lower()
        for kind in cls:
            if key in (kind.value, kind.name.lower(), kind.label.lower()):
                return kind
        raise UnknownKind(f"unknown prompt kind {name!r}")


_LABELS = {
    PromptKind.VANILLA: "Vanilla",
    PromptKind.COT: "CoT",
    PromptKind.FEWSHOT_BASE: "FewShot-Base",
    PromptKind.AOT_DFS: "AoT-DFS",
    PromptKind.AOT_ASTAR: "AoT-A*",
    PromptKind.AOT_DIJKSTRA: "AoT-Dijkstra",
    PromptKind.ALGO_DIRECT: "Algo-Direct",
    PromptKind.ALGO_REASONING: "Algo-Reasoning",
}


@dataclass(frozen=True)
class RenderedPrompt:
    kind: PromptKind
    text: str
    case_id: str

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()


@lru_cache(maxsize=None)
def load_template(kind: PromptKind) -> str:
    raw = resources.files("gridbench.templates").joinpath(f"{kind.value}.txt").read_text("utf-8")
    lines = raw.splitlines()
    while lines and lines[0].startswith("## "):
        lines.pop(0)
    return "\n".join(lines)


def serialize_obstacles(world: GridWorld) -> str:
    return "[" + ", ".join(
        f"(({a.x}, {a.y}), ({b.x}, {b.y}))" for a, b in world.obstacles
    ) + "]"


def render(kind: PromptKind | str, world: GridWorld, case: TaskCase) -> RenderedPrompt:
    try:
        kind = PromptKind.parse(kind)
    except (UnknownKind, ValueError) as exc:
        raise UnknownKind(f"unknown prompt kind {kind!r}") from exc
    values = {
        "{obstacles}": serialize_obstacles(world),
        "{start_x}": str(case.start[0]),
        "{start_y}": str(case.start[1]),
        "{end_x}": str(case.end[0]),
        "{end_y}": str(case.end[1]),
    }
    text = load_template(kind)
    for placeholder, value in values.items():
        text = text.replace(placeholder, value)
    return RenderedPrompt(kind, text, case.case_id)
