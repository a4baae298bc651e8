"""Application-centered call graph construction for Python.

Builds call graphs on demand from entry functions via flow-sensitive type
inference over per-function type graphs, scores them against ground truth,
and answers vulnerability reachability queries over the result.
"""

from .callgraph import (
    CallEdge,
    CallGraph,
    MetricsReport,
    emit,
    load_adjacency,
    prune_reachable,
    score,
    vuln_chains,
)
from .driver import Mode, ScenarioConfig, ScenarioResult, run_scenario
from .engine import Analysis
from .errors import AnalysisError, ConfigurationError
from .identifiers import IdentifierType, Kind
from .sources import ExprSite, discover_modules, parse_module
from .typegraph import FunctionTypeGraph, TypeRelation

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "AnalysisError",
    "CallEdge",
    "CallGraph",
    "ConfigurationError",
    "ExprSite",
    "FunctionTypeGraph",
    "IdentifierType",
    "Kind",
    "MetricsReport",
    "Mode",
    "ScenarioConfig",
    "ScenarioResult",
    "TypeRelation",
    "discover_modules",
    "emit",
    "load_adjacency",
    "parse_module",
    "prune_reachable",
    "run_scenario",
    "score",
    "vuln_chains",
    "__version__",
]
