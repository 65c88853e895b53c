"""SVG rendering of a task: grid cells, obstacles, endpoints, paths."""

from __future__ import annotations

from typing import Sequence

from gridbench.grid_world import GridWorld, TaskCase, is_obstacle
from gridbench.path_eval import CandidatePath

CELL = 20
MARGIN = 1  # cells of padding so out-of-bounds candidate points stay visible


def _centre(c: Sequence[int]) -> tuple[int, int]:
    # Row index x runs down the page, column index y across.
    return ((c[1] + MARGIN) * CELL + CELL // 2, (c[0] + MARGIN) * CELL + CELL // 2)


def _polyline(points: Sequence[Sequence[int]], cls: str, stroke: str, dash: str = "") -> str:
    pts = " ".join(f"{x},{y}" for x, y in map(_centre, points))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{stroke}" '
        f'stroke-width="4" stroke-linejoin="round" stroke-linecap="round"{extra}/>'
    )


def render_grid_svg(world: GridWorld, case: TaskCase, cand: CandidatePath | None = None) -> str:
    n = world.n_size
    side = (n + 2 * MARGIN) * CELL
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" '
        f'viewBox="0 0 {side} {side}">',
        f"<title>{case.case_id}</title>",
        f'<rect class="background" x="0" y="0" width="{side}" height="{side}" fill="#ffffff"/>',
    ]
    for x in range(n):
        for y in range(n):
            cls, fill = ("obstacle", "#3c3c3c") if is_obstacle(world, (x, y)) else ("cell", "#f4f4f4")
            out.append(
                f'<rect class="{cls}" x="{(y + MARGIN) * CELL}" y="{(x + MARGIN) * CELL}" '
                f'width="{CELL}" height="{CELL}" fill="{fill}" stroke="#c8c8c8" stroke-width="1"/>'
            )
    if case.reference_path:
        out.append(_polyline(case.reference_path, "reference", "#2a9d8f"))
    if cand is not None and cand.points:
        out.append(_polyline(cand.points, "candidate", "#e76f51", dash="6,4"))
    for cls, c, fill in (("start", case.start, "#264653"), ("end", case.end, "#e9c46a")):
        cx, cy = _centre(c)
        out.append(f'<circle class="{cls}" cx="{cx}" cy="{cy}" r="{CELL // 3}" fill="{fill}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
