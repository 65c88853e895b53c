"""Benchmark orchestration: run matrices, persist JSONL, aggregate reports.

A results file is JSON Lines. Each run contributes one ``"type": "header"``
line carrying its configuration, followed by one ``"type": "case"`` line per
(case, prompt). Every line carries the run's ``config_hash``; reruns with the
same hash skip pairs already on disk, so an interrupted run resumes where it
stopped.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Iterator

from gridbench.agents import AgentKind, scripted_agent
from gridbench.errors import ConfigError, EmptyResults
from gridbench.grid_world import GridWorld, SuiteConfig, TaskCase, build_suite, suite_to_json
from gridbench.model_gateway import ModelEndpoint, ModelReply, complete_many
from gridbench.path_eval import (
    PRECEDENCE,
    AggregateMetrics,
    CaseResult,
    Verdict,
    aggregate,
    parse_path,
    validate,
)
from gridbench.prompt_kit import PromptKind, RenderedPrompt, render
from gridbench.svg import render_grid_svg

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
RESULTS_FILE = "results.jsonl"
UNDEFINED = "—"
REPORT_FOOTER = (
    "GM and MSE are computed over feasible routes only; GM is reported x100.",
    "RT is the mean latency over all cases in the group, failed requests included.",
    f"{UNDEFINED} marks an undefined metric (no feasible routes in the group).",
)


@dataclass
class RunConfig:
    suites: list[SuiteConfig]
    prompts: list[PromptKind]
    agent: AgentKind | None = None
    endpoint: ModelEndpoint | None = None
    output_dir: Path = Path("runs")
    report_format: str = "table"
    render_svg: bool = False
    agent_seed: int = 0

    def validate(self) -> None:
        if not self.suites:
            raise ConfigError("at least one grid size is required")
        if not self.prompts:
            raise ConfigError("at least one prompt kind is required")
        if (self.agent is None) == (self.endpoint is None):
            raise ConfigError("exactly one of an agent or a model endpoint must be given")
        if self.report_format not in ("table", "json"):
            raise ConfigError(f"unknown report format {self.report_format!r}")
        for suite in self.suites:
            suite.validate()
        if self.endpoint is not None:
            self.endpoint.validate()
            self.endpoint.headers()  # missing credential is a config error, before any I/O

    @property
    def model_id(self) -> str:
        return f"agent:{self.agent.value}" if self.agent else self.endpoint.model_id

    def identity(self) -> dict[str, Any]:
        target = (
            {"agent": self.agent.value, "agent_seed": self.agent_seed}
            if self.agent
            else {"endpoint": self.endpoint.identity()}
        )
        return {
            "suites": [s.to_dict() for s in self.suites],
            "prompts": [p.value for p in self.prompts],
            "target": target,
        }

    @property
    def config_hash(self) -> str:
        canon = json.dumps(self.identity(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


@dataclass
class _Job:
    world: GridWorld
    case: TaskCase
    prompt: RenderedPrompt


# -- persistence -------------------------------------------------------------


def read_records(path: Path) -> Iterator[dict[str, Any]]:
    """Parse a results file, ignoring a torn final line."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.endswith("\n"):
                log.warning("ignoring incomplete trailing line in %s", path)
                break
            if line.strip():
                yield json.loads(line)


def _repair_tail(path: Path) -> None:
    # Drop a partially written last line so appends start on a fresh line.
    data = path.read_bytes()
    if data and not data.endswith(b"\n"):
        path.write_bytes(data[: data.rfind(b"\n") + 1])


def case_record(config_hash: str, model_id: str, job: _Job, reply: ModelReply, verdict: Verdict, points) -> dict:
    case = job.case
    return {
        "type": "case",
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash,
        "model_id": model_id,
        "prompt_kind": job.prompt.kind.value,
        "n_size": job.world.n_size,
        "env_ref": case.env_ref,
        "case_id": case.case_id,
        "start": list(case.start),
        "end": list(case.end),
        "optimal_len": case.optimal_len,
        "prompt_sha256": job.prompt.sha256,
        "reply": reply.text,
        "points": [list(p) for p in points],
        "verdict": verdict.to_dict(),
        "latency_s": reply.latency_s,
        "attempt_count": reply.attempt_count,
        "failed": reply.failed,
    }


def _agent_replies(config: RunConfig, jobs: list[_Job]) -> Iterator[ModelReply]:
    for job in jobs:
        t0 = time.perf_counter()
        text = scripted_agent(config.agent, job.world, job.case, config.agent_seed)
        yield ModelReply(text, time.perf_counter() - t0, 1, False)


def run_benchmark(config: RunConfig) -> Path:
    """Execute the (size x case x prompt) matrix and return the results path."""
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = out_dir / RESULTS_FILE
    config_hash = config.config_hash

    done: set[tuple[str, str]] = set()
    have_header = False
    if results.exists():
        _repair_tail(results)
        for rec in read_records(results):
            if rec.get("config_hash") != config_hash:
                continue
            if rec["type"] == "header":
                have_header = True
            else:
                done.add((rec["case_id"], rec["prompt_kind"]))

    jobs: list[_Job] = []
    for suite_cfg in config.suites:
        suite = build_suite(suite_cfg)
        (out_dir / f"suite_N{suite_cfg.n_size}.json").write_text(
            suite_to_json(suite_cfg, suite), encoding="utf-8"
        )
        for world, cases in suite:
            for case in cases:
                for kind in config.prompts:
                    if (case.case_id, kind.value) not in done:
                        jobs.append(_Job(world, case, render(kind, world, case)))

    if config.agent is not None:
        replies: Iterable[ModelReply] = _agent_replies(config, jobs)
    else:
        replies = complete_many(config.endpoint, [j.prompt for j in jobs])

    svg_dir = out_dir / "svg"
    if config.render_svg:
        svg_dir.mkdir(exist_ok=True)

    with open(results, "a", encoding="utf-8") as fh:
        if not have_header:
            header = {
                "type": "header",
                "schema_version": SCHEMA_VERSION,
                "config_hash": config_hash,
                "seed": config.suites[0].seed,
                "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "model_id": config.model_id,
                "config": config.identity(),
            }
            fh.write(json.dumps(header, ensure_ascii=False) + "\n")
            fh.flush()
        for job, reply in zip(jobs, replies):
            cand = parse_path(reply.text)
            verdict = validate(job.world, job.case, cand)
            rec = case_record(config_hash, config.model_id, job, reply, verdict, cand.points)
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            fh.flush()
            if config.render_svg:
                svg = render_grid_svg(job.world, job.case, cand)
                (svg_dir / f"{job.case.case_id}__{job.prompt.kind.value}.svg").write_text(svg, encoding="utf-8")
    log.info("wrote %d new records to %s", len(jobs), results)

    rep = report(results)
    (out_dir / "report.json").write_text(json.dumps(report_to_json(rep), indent=2) + "\n", encoding="utf-8")
    (out_dir / "report.txt").write_text(format_report(rep), encoding="utf-8")
    return results


# -- reporting ---------------------------------------------------------------


@dataclass
class ReportGroup:
    config_hash: str
    model_id: str
    prompt_kind: str
    n_size: int
    metrics: AggregateMetrics
    errors: dict[str, int] = field(default_factory=dict)


def result_from_record(rec: dict[str, Any]) -> CaseResult:
    return CaseResult(
        case_id=rec["case_id"],
        verdict=Verdict.from_dict(rec["verdict"]),
        optimal_len=rec["optimal_len"],
        latency_s=rec["latency_s"],
        prompt_kind=rec["prompt_kind"],
        model_id=rec["model_id"],
        n_size=rec["n_size"],
    )


def report(path: Path | str) -> list[ReportGroup]:
    """One aggregate row per (run, model, prompt, size), in first-seen order."""
    groups: dict[tuple[str, str, str, int], list[CaseResult]] = {}
    for rec in read_records(Path(path)):
        if rec.get("type") != "case":
            continue
        key = (rec["config_hash"], rec["model_id"], rec["prompt_kind"], rec["n_size"])
        groups.setdefault(key, []).append(result_from_record(rec))
    if not groups:
        raise EmptyResults(f"{path} contains no case records")
    out = []
    for (h, model, prompt, size), results in groups.items():
        hist = Counter(r.verdict.primary_error.value for r in results if r.verdict.primary_error)
        errors = {e.value: hist.get(e.value, 0) for e in PRECEDENCE}
        out.append(ReportGroup(h, model, prompt, size, aggregate(results), errors))
    return out


def report_to_json(groups: list[ReportGroup]) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "groups": [
            {
                "config_hash": g.config_hash,
                "model_id": g.model_id,
                "prompt_kind": g.prompt_kind,
                "n_size": g.n_size,
                "metrics": g.metrics.to_dict(),
                "primary_errors": g.errors,
            }
            for g in groups
        ],
        "notes": list(REPORT_FOOTER),
    }


def _num(value: float | None, digits: int) -> str:
    if value is None:
        return UNDEFINED
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.{digits}f}"


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]

    def fmt(row: list[str]) -> str:
        # Four key columns left-aligned, numbers right-aligned.
        return "  ".join(c.ljust(w) if i < 4 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))

    return [fmt(header), "  ".join("-" * w for w in widths), *map(fmt, rows)]


def format_report(groups: list[ReportGroup]) -> str:
    metric_rows, error_rows = [], []
    for g in groups:
        m = g.metrics
        label = PromptKind(g.prompt_kind).label if g.prompt_kind in PromptKind._value2member_map_ else g.prompt_kind
        key = [g.config_hash[:8], g.model_id, label, str(g.n_size)]
        gm = m.gm_reported
        metric_rows.append(key + [
            _num(m.CR, 1), _num(m.FR, 1), _num(m.OR, 1),
            UNDEFINED if gm is None else f"{gm:.2f}",
            _num(m.MSE, 2), f"{m.RT:.2f}", str(m.n_cases),
        ])
        error_rows.append(key + [str(g.errors[e.value]) for e in PRECEDENCE])
    lines = _table(
        ["Run", "Model", "Prompt", "Size", "CR", "FR", "OR", "GM", "MSE", "RT(s)", "N"], metric_rows
    )
    lines += ["", "Primary errors"]
    lines += _table(["Run", "Model", "Prompt", "Size", *[e.value for e in PRECEDENCE]], error_rows)
    lines += ["", *REPORT_FOOTER]
    return "\n".join(lines) + "\n"
