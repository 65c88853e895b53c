"""Grid path-planning benchmark harness for language-model route planners."""

from gridbench.errors import (
    ConfigError,
    EmptyResults,
    GridBenchError,
    InvalidEndpoint,
    PlacementExhausted,
    SamplingExhausted,
    UndefinedMetric,
    UnknownKind,
)
from gridbench.grid_world import (
    Coord,
    GridWorld,
    Obstacle,
    SuiteConfig,
    TaskCase,
    build_suite,
    generate_environment,
    in_bounds,
    is_obstacle,
    sample_endpoint_pairs,
)
from gridbench.path_eval import (
    AggregateMetrics,
    CandidatePath,
    CaseResult,
    ErrorType,
    Verdict,
    aggregate,
    geometric_mean,
    mse,
    parse_path,
    validate,
)
from gridbench.prompt_kit import PromptKind, RenderedPrompt, render, serialize_obstacles
from gridbench.solvers import (
    astar_shortest,
    bfs_connected,
    dfs_first_path,
    dijkstra_shortest,
    path_length,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateMetrics",
    "CandidatePath",
    "CaseResult",
    "ConfigError",
    "Coord",
    "EmptyResults",
    "ErrorType",
    "GridBenchError",
    "GridWorld",
    "InvalidEndpoint",
    "Obstacle",
    "PlacementExhausted",
    "PromptKind",
    "RenderedPrompt",
    "SamplingExhausted",
    "SuiteConfig",
    "TaskCase",
    "UndefinedMetric",
    "UnknownKind",
    "Verdict",
    "aggregate",
    "astar_shortest",
    "bfs_connected",
    "build_suite",
    "dfs_first_path",
    "dijkstra_shortest",
    "generate_environment",
    "geometric_mean",
    "in_bounds",
    "is_obstacle",
    "mse",
    "parse_path",
    "path_length",
    "render",
    "sample_endpoint_pairs",
    "serialize_obstacles",
    "validate",
]
