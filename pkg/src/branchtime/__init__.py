"""Branched-time structures and Cauchy problems ``x' = f(x)`` on them."""

from .cauchy import (
    CauchyProblem,
    Condition,
    ConsistencyReport,
    Solution,
    SolverConfig,
    Status,
    Trajectory,
    check_loop_consistency,
    dual_continuations,
    integrate_segment,
    rewrite_history,
    solve,
    solve_circle,
)
from .exprdsl import evaluate, parse, to_text
from .graph import graph_of, to_dot
from .order import (
    chron_equiv_classes,
    chron_leq,
    chron_relation_report,
    hausdorff_pairs,
    is_hausdorff,
    mccabe_quotient,
)
from .timeline import (
    Horizon,
    StructureError,
    TemporalStructure,
    TimePoint,
    identify,
    line,
    locate,
    split_division,
    split_point,
    split_sticking,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "CauchyProblem",
    "Condition",
    "ConsistencyReport",
    "Horizon",
    "Solution",
    "SolverConfig",
    "Status",
    "StructureError",
    "TemporalStructure",
    "TimePoint",
    "Trajectory",
    "check_loop_consistency",
    "chron_equiv_classes",
    "chron_leq",
    "chron_relation_report",
    "dual_continuations",
    "evaluate",
    "graph_of",
    "hausdorff_pairs",
    "identify",
    "integrate_segment",
    "is_hausdorff",
    "line",
    "locate",
    "mccabe_quotient",
    "parse",
    "rewrite_history",
    "solve",
    "solve_circle",
    "split_division",
    "split_point",
    "split_sticking",
    "to_dot",
    "to_text",
    "validate",
]
