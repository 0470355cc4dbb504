"""Certifying DFS numberings of bounded-degree graphs, exactly and with sublinear testers."""

from .exact import (
    ACCEPT,
    OrderViolation,
    Verdict,
    check_by_conflicts,
    check_by_simulation,
    fix_edge,
    fix_vertex,
    repair,
    sweepline_conflicts,
    validate_witness,
)
from .graph import (
    ConflictingPair,
    Edit,
    LabeledGraph,
    apply_edits,
    build_graph,
    conflict_matching,
    enumerate_conflicts,
    is_conflicting_pair,
    parent_label,
)
from .oracle import BudgetExhausted, GraphOracle, QueryCounter
from .tester import TesterParams, test_combined, test_simple

__all__ = [
    "ACCEPT",
    "BudgetExhausted",
    "ConflictingPair",
    "Edit",
    "GraphOracle",
    "LabeledGraph",
    "OrderViolation",
    "QueryCounter",
    "TesterParams",
    "Verdict",
    "apply_edits",
    "build_graph",
    "check_by_conflicts",
    "check_by_simulation",
    "conflict_matching",
    "enumerate_conflicts",
    "fix_edge",
    "fix_vertex",
    "is_conflicting_pair",
    "parent_label",
    "repair",
    "sweepline_conflicts",
    "test_combined",
    "test_simple",
    "validate_witness",
]
