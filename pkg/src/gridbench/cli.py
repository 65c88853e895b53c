"""Command-line entry point: ``gridbench <command> [options]``.

Commands: generate, solve, prompt, run, report, render. Options may also come
from a YAML file (``--config``) whose keys are flat dotted paths such as
``model.base_url`` (nested mappings are flattened to the same keys). Flags
given on the command line override file values.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

import yaml

from gridbench.agents import AgentKind
from gridbench.errors import ConfigError, GridBenchError
from gridbench.grid_world import SuiteConfig, TaskCase, GridWorld, build_suite, suite_to_json
from gridbench.model_gateway import ModelEndpoint
from gridbench.path_eval import CandidatePath, format_path, parse_path
from gridbench.prompt_kit import PromptKind, render
from gridbench.runner import RunConfig, format_report, report, report_to_json, run_benchmark
from gridbench.solvers import astar_shortest, dfs_first_path, dijkstra_shortest
from gridbench.svg import render_grid_svg

SOLVERS = {"dijkstra": dijkstra_shortest, "astar": astar_shortest, "dfs": dfs_first_path}

CONFIG_KEYS = {
    "seed", "sizes", "envs", "pairs", "prompts", "agent", "agent_seed", "out", "report", "svg",
    "model.id", "model.base_url", "model.credential_env", "model.temperature",
    "model.max_tokens", "model.timeout_s", "model.max_retries", "model.parallelism",
    "model.backoff_s", "model.debug_wire",
}


def _flatten(d: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in d.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, path + "."))
        else:
            flat[path] = value
    return flat


def load_config_file(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    flat = _flatten(data)
    unknown = sorted(set(flat) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {', '.join(unknown)}")
    return flat


def _settings(args: argparse.Namespace) -> dict[str, Any]:
    s = load_config_file(getattr(args, "config", None))
    overrides = {
        "seed": args.seed,
        "sizes": args.size,
        "envs": args.envs,
        "pairs": args.pairs,
        "prompts": getattr(args, "prompt", None),
        "agent": getattr(args, "agent", None),
        "agent_seed": getattr(args, "agent_seed", None),
        "out": getattr(args, "out", None),
        "report": getattr(args, "report", None),
        "svg": getattr(args, "svg", None) or None,
        "model.id": getattr(args, "model", None),
        "model.base_url": getattr(args, "base_url", None),
        "model.credential_env": getattr(args, "api_key_env", None),
        "model.parallelism": getattr(args, "parallelism", None),
        "model.debug_wire": getattr(args, "debug_wire", None) or None,
    }
    s.update({k: v for k, v in overrides.items() if v is not None})
    return s


def _suites(s: dict[str, Any], default_sizes=(10, 20, 30)) -> list[SuiteConfig]:
    sizes = s.get("sizes") or list(default_sizes)
    if isinstance(sizes, int):
        sizes = [sizes]
    extra = {"seed": int(s.get("seed", 0))}
    if s.get("envs") is not None:
        extra["envs_per_config"] = int(s["envs"])
    if s.get("pairs") is not None:
        extra["pairs_per_env"] = int(s["pairs"])
    suites = []
    for size in sizes:
        if isinstance(size, dict):
            suites.append(SuiteConfig(**{**extra, **size}))
        else:
            suites.append(SuiteConfig.for_size(int(size), **extra))
    if len({c.n_size for c in suites}) != len(suites):
        raise ConfigError("grid sizes must be distinct")
    return suites


def _find_case(s: dict[str, Any], case_id: str) -> tuple[SuiteConfig, GridWorld, TaskCase]:
    try:
        size = int(case_id.split("-")[0].lstrip("N"))
    except ValueError as exc:
        raise ConfigError(f"malformed case id {case_id!r}") from exc
    cfg = _suites({**s, "sizes": [size]})[0]
    for world, cases in build_suite(cfg):
        for case in cases:
            if case.case_id == case_id:
                return cfg, world, case
    raise ConfigError(f"case {case_id} is not in the suite for this configuration")


def _run_config(s: dict[str, Any]) -> RunConfig:
    prompts = s.get("prompts") or ["aot_dijkstra"]
    if isinstance(prompts, str):
        prompts = [prompts]
    agent = endpoint = None
    if s.get("agent") and s.get("model.id"):
        raise ConfigError("give either --agent or --model, not both")
    if s.get("agent"):
        agent = AgentKind.parse(s["agent"])
    elif s.get("model.id"):
        if not s.get("model.base_url"):
            raise ConfigError("--model needs --base-url (or model.base_url in the config)")
        fields = {
            "temperature": float, "max_tokens": int, "timeout_s": float,
            "max_retries": int, "parallelism": int, "backoff_s": float, "debug_wire": bool,
        }
        endpoint = ModelEndpoint(
            base_url=s["model.base_url"],
            model_id=s["model.id"],
            credential_ref=s.get("model.credential_env"),
            **{k: cast(s[f"model.{k}"]) for k, cast in fields.items() if f"model.{k}" in s},
        )
    else:
        raise ConfigError("a target is required: --agent KIND or --model ID")
    return RunConfig(
        suites=_suites(s),
        prompts=[PromptKind.parse(p) for p in prompts],
        agent=agent,
        endpoint=endpoint,
        output_dir=Path(s.get("out", "runs/latest")),
        report_format=s.get("report", "table"),
        render_svg=bool(s.get("svg", False)),
        agent_seed=int(s.get("agent_seed", 0)),
    )


def cmd_generate(args, s) -> None:
    chunks = []
    for cfg in _suites(s):
        text = suite_to_json(cfg, build_suite(cfg))
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"suite_N{cfg.n_size}.json").write_text(text, encoding="utf-8")
        else:
            chunks.append(text)
    sys.stdout.write("".join(chunks))


def cmd_solve(args, s) -> None:
    _, world, case = _find_case(s, args.case_id)
    path = SOLVERS[args.algo](world, case.start, case.end)
    print(format_path(path) if path else "[]")


def cmd_prompt(args, s) -> None:
    _, world, case = _find_case(s, args.case_id)
    print(render(PromptKind.parse(args.prompt[0] if args.prompt else "vanilla"), world, case).text)


def cmd_render(args, s) -> None:
    _, world, case = _find_case(s, args.case_id)
    cand: CandidatePath | None = parse_path(args.candidate) if args.candidate else None
    svg = render_grid_svg(world, case, cand)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)


def _print_report(path: Path, fmt: str) -> None:
    groups = report(path)
    if fmt == "json":
        print(json.dumps(report_to_json(groups), indent=2))
    else:
        sys.stdout.write(format_report(groups))


def cmd_run(args, s) -> None:
    config = _run_config(s)
    results = run_benchmark(config)
    print(f"results: {results}", file=sys.stderr)
    _print_report(results, config.report_format)


def cmd_report(args, s) -> None:
    _print_report(Path(args.results), s.get("report", "table"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (flat dotted keys)")
    common.add_argument("--seed", type=int)
    common.add_argument("--size", type=int, action="append", help="grid size: 10, 20 or 30 (repeatable)")
    common.add_argument("--envs", type=int, help="environments per size")
    common.add_argument("--pairs", type=int, help="origin/destination pairs per environment")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gridbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="emit suite JSON")
    p.add_argument("--out", help="directory for suite_N<size>.json files (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", parents=[common], help="print the reference path for a case")
    p.add_argument("case_id", help="e.g. N10-e000-p0")
    p.add_argument("--algo", choices=sorted(SOLVERS), default="dijkstra")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("prompt", parents=[common], help="print a rendered prompt")
    p.add_argument("case_id")
    p.add_argument("--prompt", action="append", help="prompt kind")
    p.set_defaults(func=cmd_prompt)

    p = sub.add_parser("run", parents=[common], help="run a benchmark matrix")
    p.add_argument("--prompt", action="append", help="prompt kind (repeatable)")
    p.add_argument("--agent", help="scripted agent: " + ", ".join(k.value for k in AgentKind))
    p.add_argument("--agent-seed", type=int)
    p.add_argument("--model", help="model id at an OpenAI-compatible endpoint")
    p.add_argument("--base-url", help="endpoint base URL, e.g. https://host/v1")
    p.add_argument("--api-key-env", help="environment variable holding the API key")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--debug-wire", action="store_true", help="log request/response bodies")
    p.add_argument("--out", help="output directory")
    p.add_argument("--report", choices=["table", "json"])
    p.add_argument("--svg", action="store_true", help="write one SVG per case and prompt")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", parents=[common], help="aggregate a results file")
    p.add_argument("results", help="results.jsonl")
    p.add_argument("--report", choices=["table", "json"])
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("render", parents=[common], help="SVG of a case")
    p.add_argument("case_id")
    p.add_argument("--candidate", help="candidate path text, e.g. '[(0, 0), (0, 1)]'")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    debug = getattr(args, "debug_wire", False)
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args, _settings(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (GridBenchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
