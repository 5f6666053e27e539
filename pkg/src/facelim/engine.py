"""Edge elimination, preaccumulation and plan replay on the line dag.

Eliminating an intermediate edge (u, v) creates (or absorbs into) the vertex
for the concatenated path, removes the edge, cleans up endpoints that became
isolated, and merges vertices whose neighborhoods coincide.  The three fma
flavors and their costs:

    TAN  seed v's tangent model with u's block      cost n_source(u) * ert_tan(v)
    ADJ  seed u's adjoint model with v's block      cost n_sink(v) * ert_adj(u)
    MUL  explicit product of the two blocks         cost n_source(u) * n_pivot * n_sink(v)

Preaccumulating an elemental seeds its tangent or adjoint with an identity;
the cheaper side wins under AUTO.  Merges and absorbs are matrix additions
and cost nothing.

Merging here requires both neighborhoods (predecessor AND successor sets) to
coincide and both blocks to be present.  One-sided neighborhood equality, as
the classical formulation words it, can drop a still-pending edge of the
removed vertex and corrupt the accumulated Jacobian; the two-sided test is
safe and is checked by the numeric verifier over randomized corpora.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Dag
from .linedag import (
    Action,
    Label,
    LineDag,
    LineVertex,
    build_line_dag,
    is_complete,
)


class EngineError(Exception):
    """Base for elimination-engine failures."""


class NoSuchEdge(EngineError):
    pass


class NoSuchVertex(EngineError):
    pass


class NotEliminatable(EngineError):
    pass


class AlreadyAccumulated(EngineError):
    pass


class NotElemental(EngineError):
    pass


class StepInapplicable(EngineError):
    def __init__(self, index: int, reason: str):
        self.index = index
        super().__init__(f"step {index}: {reason}")


class CostMismatch(EngineError):
    def __init__(self, index: int, recorded: int, actual: int):
        self.index = index
        self.recorded = recorded
        self.actual = actual
        super().__init__(
            f"step {index}: recorded cost {recorded} != recomputed {actual}"
        )


@dataclass(frozen=True)
class PlanStep:
    kind: str  # "ACC" | "ELI"
    mode: str  # "TAN" | "ADJ" | "MUL" (ACC uses TAN/ADJ only)
    target: Label
    cost: int

    def render(self) -> str:
        label = " ".join(str(i) for i in self.target)
        return f"{self.kind} {self.mode} ({label}) {self.cost}"


@dataclass
class Plan:
    steps: list[PlanStep] = field(default_factory=list)

    @property
    def total_cost(self) -> int:
        return sum(s.cost for s in self.steps)

    def render(self) -> str:
        return "\n".join(s.render() for s in self.steps)

    def __len__(self):
        return len(self.steps)


@dataclass
class PlanReport:
    method: str
    dense_tangent: int
    dense_adjoint: int
    plan: Plan
    optimized_cost: int
    optimal: bool
    budget_exhausted: bool = False
    stats: object | None = None
    elapsed_s: float = 0.0
    verification: object | None = None


# ---------------------------------------------------------------------------
# core mutations


def _absorb_target(ld: LineDag, source: int, sink: int, pset, sset,
                   skip=()) -> Label | None:
    hits = [
        label
        for label, vert in ld.z.items()
        if label not in skip
        and vert.jacobian
        and label[0] == source
        and label[-1] == sink
        and ld.pred[label] == pset
        and ld.succ[label] == sset
    ]
    return min(hits) if hits else None


def _merge_keep_order(ld: LineDag, a: Label, b: Label) -> tuple[Label, Label]:
    # Keep the elemental if there is one (its models stay usable), else the
    # lexicographically smaller label.  Two elementals never collide: there
    # is one per original edge.
    if ld.z[a].is_elemental:
        return a, b
    if ld.z[b].is_elemental:
        return b, a
    return min(a, b), max(a, b)


def _saturate_merges(ld: LineDag) -> None:
    """Merge any two vertices with identical neighborhoods that both hold
    their block.  Runs to a fixed point; additions cost nothing."""
    changed = True
    while changed:
        changed = False
        groups: dict[tuple[int, int], list[Label]] = {}
        for label, vert in ld.z.items():
            if vert.jacobian:
                groups.setdefault((label[0], label[-1]), []).append(label)
        for labels in groups.values():
            if len(labels) < 2:
                continue
            labels.sort()
            for i, a in enumerate(labels):
                for b in labels[i + 1:]:
                    if ld.pred[a] == ld.pred[b] and ld.succ[a] == ld.succ[b]:
                        keep, gone = _merge_keep_order(ld, a, b)
                        if ld.values is not None:
                            ld.values[keep] = ld.values[keep] + ld.values[gone]
                        ld.merge_log.append((gone, keep))
                        ld.drop_vertex(gone)
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break


def eliminate_edge(ld: LineDag, left: Label, right: Label, mode: str) -> int:
    """Apply one face/edge elimination of the given flavor; returns its cost."""
    if left not in ld.z or right not in ld.z or right not in ld.succ[left]:
        raise NoSuchEdge(f"no intermediate edge {left} -> {right}")
    u, v = ld.z[left], ld.z[right]
    if mode == "TAN":
        if not u.jacobian:
            raise NotEliminatable(f"TAN needs the block of {left}")
        if not v.is_elemental:
            raise NotEliminatable(f"TAN needs a tangent model on {right}")
        cost = u.cols * v.tangent_cost
    elif mode == "ADJ":
        if not v.jacobian:
            raise NotEliminatable(f"ADJ needs the block of {right}")
        if not u.is_elemental:
            raise NotEliminatable(f"ADJ needs an adjoint model on {left}")
        cost = v.rows * u.adjoint_cost
    elif mode == "MUL":
        if not (u.jacobian and v.jacobian):
            raise NotEliminatable("MUL needs both blocks")
        cost = u.cols * ld.sizes[left[-1]] * v.rows
    else:
        raise NotEliminatable(f"unknown mode {mode!r}")

    prod = None
    if ld.values is not None:
        if mode == "TAN":
            prod = ld.elem_values[right] @ ld.values[left]
        elif mode == "ADJ":
            prod = ld.values[right] @ ld.elem_values[left]
        else:
            prod = ld.values[right] @ ld.values[left]

    pset = set(ld.pred[left])
    sset = set(ld.succ[right])
    face = left + right[1:]
    target = _absorb_target(ld, left[0], right[-1], pset, sset,
                            skip=(left, right))
    if target is not None:
        if ld.values is not None:
            ld.values[target] = ld.values[target] + prod
    else:
        if face in ld.z:
            raise EngineError(
                f"fill label {face} already taken by a vertex with a "
                f"different neighborhood"
            )
        ld.add_vertex(LineVertex(face, rows=v.rows, cols=u.cols, jacobian=True))
        for p in pset:
            ld.add_edge(p, face)
        for s in sset:
            ld.add_edge(face, s)
        if ld.values is not None:
            ld.values[face] = prod

    ld.remove_edge(left, right)
    if not ld.succ[left]:
        ld.drop_vertex(left)
    if right in ld.z and not ld.pred[right]:
        ld.drop_vertex(right)
    _saturate_merges(ld)
    return cost


def preaccumulate(ld: LineDag, label: Label, mode: str = "AUTO") -> tuple[str, int]:
    """Turn an elemental's model into its explicit block; AUTO takes the
    cheaper of the two seedings (tangent on ties)."""
    if label not in ld.z:
        raise NoSuchVertex(f"no vertex {label}")
    vert = ld.z[label]
    if not vert.is_elemental:
        raise NotElemental(f"{label} is fill and has no model to seed")
    if vert.jacobian:
        raise AlreadyAccumulated(f"{label} already holds its block")
    tan = vert.cols * vert.tangent_cost
    adj = vert.rows * vert.adjoint_cost
    if mode == "AUTO":
        mode = "TAN" if tan <= adj else "ADJ"
    if mode == "TAN":
        cost = tan
    elif mode == "ADJ":
        cost = adj
    else:
        raise EngineError(f"preaccumulation mode must be TAN/ADJ/AUTO, not {mode!r}")
    vert.jacobian = True
    if ld.values is not None:
        ld.values[label] = ld.elem_values[label]
    _saturate_merges(ld)
    return mode, cost


def apply_action(ld: LineDag, action: Action) -> list[PlanStep]:
    """Execute one search move, returning its plan steps."""
    steps: list[PlanStep] = []
    if action.kind == "finalize":
        mode, cost = preaccumulate(ld, action.vertex, "AUTO")
        steps.append(PlanStep("ACC", mode, action.vertex, cost))
        return steps
    for w in action.preaccs:
        mode, cost = preaccumulate(ld, w, "AUTO")
        steps.append(PlanStep("ACC", mode, w, cost))
    u, v = action.edge
    cost = eliminate_edge(ld, u, v, action.mode)
    steps.append(PlanStep("ELI", action.mode, action.target_label, cost))
    return steps


# ---------------------------------------------------------------------------
# replay


def _replay_steps(ld: LineDag, plan: Plan) -> int:
    total = 0
    for idx, step in enumerate(plan.steps):
        try:
            if step.kind == "ACC":
                _, cost = preaccumulate(ld, step.target, step.mode)
            elif step.kind == "ELI":
                matches = [
                    (u, v)
                    for u, v in ld.zz_edges()
                    if u + v[1:] == step.target
                ]
                if not matches:
                    raise StepInapplicable(
                        idx, f"no intermediate edge with face {step.target}"
                    )
                u, v = matches[0]
                cost = eliminate_edge(ld, u, v, step.mode)
            else:
                raise StepInapplicable(idx, f"unknown step kind {step.kind!r}")
        except StepInapplicable:
            raise
        except EngineError as exc:
            raise StepInapplicable(idx, str(exc)) from None
        if cost != step.cost:
            raise CostMismatch(idx, step.cost, cost)
        total += cost
    return total


def replay_sequence(dag: Dag, plan: Plan) -> tuple[int, LineDag, bool]:
    """Re-execute a plan from the initial line dag, re-deriving every step
    cost.  Returns (total cost, final state, completeness)."""
    ld = build_line_dag(dag)
    total = _replay_steps(ld, plan)
    return total, ld, is_complete(ld)
