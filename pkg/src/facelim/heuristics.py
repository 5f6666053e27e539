"""Baseline planners: sparse tangent, sparse adjoint, greedy minimum fill.

All three are ordinary elimination sequences executed through the engine, so
absorbs and merges are active and their totals are engine-derived rather
than closed-form.
"""

from __future__ import annotations

from .graph import Dag
from .linedag import MODE_RANK, LineDag, build_line_dag, eliminatable_targets, is_complete
from .engine import EngineError, Plan, PlanStep, apply_action, eliminate_edge, preaccumulate


def _step_guard(dag: Dag) -> int:
    return 10 * max(1, len(dag.edges)) ** 2


def plan_sparse_tangent(dag: Dag) -> Plan:
    """Preaccumulate the input-sourced elementals in tangent mode, then push
    tangents through every remaining intermediate edge in topological order
    of the pivot vertex."""
    ld = build_line_dag(dag)
    steps: list[PlanStep] = []
    inputs = set(dag.inputs)
    for label in sorted(
        l for l, v in ld.z.items()
        if v.is_elemental and not v.jacobian and l[0] in inputs
    ):
        _, cost = preaccumulate(ld, label, "TAN")
        steps.append(PlanStep("ACC", "TAN", label, cost))
    pos = {i: k for k, i in enumerate(dag.topological_order())}
    guard = _step_guard(dag)
    while True:
        edges = ld.zz_edges()
        if not edges:
            break
        u, v = min(edges, key=lambda e: (pos[e[0][-1]], e[0] + e[1][1:]))
        cost = eliminate_edge(ld, u, v, "TAN")
        steps.append(PlanStep("ELI", "TAN", u + v[1:], cost))
        if len(steps) > guard:
            raise EngineError("sparse tangent sweep did not terminate")
    for label in sorted(
        l for l, v in ld.z.items() if v.is_elemental and not v.jacobian
    ):
        _, cost = preaccumulate(ld, label, "TAN")
        steps.append(PlanStep("ACC", "TAN", label, cost))
    assert is_complete(ld)
    return Plan(steps)


def plan_sparse_adjoint(dag: Dag) -> Plan:
    """Mirror image: preaccumulate the output-sinked elementals in adjoint
    mode, then pull adjoints through the intermediate edges in reverse
    topological order of the pivot."""
    ld = build_line_dag(dag)
    steps: list[PlanStep] = []
    outputs = set(dag.outputs)
    for label in sorted(
        l for l, v in ld.z.items()
        if v.is_elemental and not v.jacobian and l[-1] in outputs
    ):
        _, cost = preaccumulate(ld, label, "ADJ")
        steps.append(PlanStep("ACC", "ADJ", label, cost))
    pos = {i: k for k, i in enumerate(dag.topological_order())}
    guard = _step_guard(dag)
    while True:
        edges = ld.zz_edges()
        if not edges:
            break
        u, v = min(edges, key=lambda e: (-pos[e[0][-1]], e[0] + e[1][1:]))
        cost = eliminate_edge(ld, u, v, "ADJ")
        steps.append(PlanStep("ELI", "ADJ", u + v[1:], cost))
        if len(steps) > guard:
            raise EngineError("sparse adjoint sweep did not terminate")
    for label in sorted(
        l for l, v in ld.z.items() if v.is_elemental and not v.jacobian
    ):
        _, cost = preaccumulate(ld, label, "ADJ")
        steps.append(PlanStep("ACC", "ADJ", label, cost))
    assert is_complete(ld)
    return Plan(steps)


def greedy_complete(ld: LineDag, guard: int | None = None) -> list[PlanStep]:
    """Greedy minimum-fill completion of an arbitrary elimination state.

    Every admissible move is scored by the net change in intermediate vertex
    count it would cause (fill +1, absorbs/merges/removals negative), with
    ties broken by step cost, then TAN before ADJ before MUL, then target
    label.  Scoring runs each candidate on a throwaway copy so merge cascades
    are priced exactly.
    """
    steps: list[PlanStep] = []
    rounds = 0
    while True:
        actions = eliminatable_targets(ld)
        if not actions:
            break
        best = None
        for action in actions:
            trial = ld.clone()
            trial_steps = apply_action(trial, action)
            delta = len(trial.z) - len(ld.z)
            cost = sum(s.cost for s in trial_steps)
            rank = MODE_RANK.get(action.mode, -1)
            key = (delta, cost, rank, action.target_label)
            if best is None or key < best[0]:
                best = (key, trial, trial_steps)
        _, ld_next, best_steps = best
        ld.z, ld.succ, ld.pred = ld_next.z, ld_next.succ, ld_next.pred
        ld.values, ld.merge_log = ld_next.values, ld_next.merge_log
        steps.extend(best_steps)
        rounds += 1
        if guard is not None and rounds > guard:
            raise EngineError("greedy sweep did not terminate")
    return steps


def plan_greedy_min_fill(dag: Dag) -> Plan:
    ld = build_line_dag(dag)
    steps = greedy_complete(ld, guard=_step_guard(dag))
    assert is_complete(ld)
    return Plan(steps)
