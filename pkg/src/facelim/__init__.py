"""Minimal-cost Jacobian accumulation planning on annotated computational DAGs.

The planner works on directed acyclic graphs of vector-valued elemental
functions.  Vertices carry the width of the value they hold; edges carry the
run time of one scalar tangent or adjoint sweep of the elemental they belong
to, plus a flag for elemental Jacobians that are already available.  Plans
are sequences of preaccumulation and face elimination steps; every emitted
plan can be certified numerically against direct chain-rule propagation.
"""

from .graph import (
    Dag,
    DagEdge,
    DagVertex,
    dense_adjoint_cost,
    dense_tangent_cost,
    parse_graphml,
    serialize_graphml,
    transpose_dag,
    validate_dag,
)
from .linedag import LineDag, build_line_dag, eliminatable_targets, is_complete
from .engine import (
    Plan,
    PlanReport,
    PlanStep,
    eliminate_edge,
    preaccumulate,
    replay_sequence,
)
from .heuristics import (
    plan_greedy_min_fill,
    plan_sparse_adjoint,
    plan_sparse_tangent,
)
from .bnb import SearchStats, solve_branch_and_bound
from .chaindp import ChainSpec, chain_as_dag, enumerate_chain_strategies, optimize_chain
from .verify import (
    instantiate_numeric,
    reference_jacobian,
    execute_sequence_numeric,
    verify_plan,
)

__all__ = [
    "Dag",
    "DagEdge",
    "DagVertex",
    "parse_graphml",
    "serialize_graphml",
    "transpose_dag",
    "validate_dag",
    "dense_tangent_cost",
    "dense_adjoint_cost",
    "LineDag",
    "build_line_dag",
    "is_complete",
    "eliminatable_targets",
    "Plan",
    "PlanStep",
    "PlanReport",
    "eliminate_edge",
    "preaccumulate",
    "replay_sequence",
    "plan_sparse_tangent",
    "plan_sparse_adjoint",
    "plan_greedy_min_fill",
    "SearchStats",
    "solve_branch_and_bound",
    "ChainSpec",
    "chain_as_dag",
    "optimize_chain",
    "enumerate_chain_strategies",
    "instantiate_numeric",
    "reference_jacobian",
    "execute_sequence_numeric",
    "verify_plan",
]
