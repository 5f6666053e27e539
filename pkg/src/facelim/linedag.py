"""Line dag of an annotated dag: the state that elimination steps act on.

Intermediate vertices stand for edges of the original dag and, once fill has
been created, for longer paths.  Labels keep the full path so step targets
read like ``(0 1 2)``.  Input and output rim vertices are retained as
single-index labels so neighborhood comparisons see them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Dag

Label = tuple[int, ...]

MODE_RANK = {"TAN": 0, "ADJ": 1, "MUL": 2}


@dataclass
class LineVertex:
    label: Label
    rows: int  # width of the sink vertex
    cols: int  # width of the source vertex
    jacobian: bool = False
    tangent_cost: int | None = None
    adjoint_cost: int | None = None

    @property
    def source(self) -> int:
        return self.label[0]

    @property
    def sink(self) -> int:
        return self.label[-1]

    @property
    def is_elemental(self) -> bool:
        # Fill never carries tangent/adjoint models.
        return self.tangent_cost is not None

    def copy(self) -> "LineVertex":
        return LineVertex(
            self.label, self.rows, self.cols, self.jacobian,
            self.tangent_cost, self.adjoint_cost,
        )


class LineDag:
    """Mutable elimination state.

    ``values`` and ``elem_values`` are optional numeric payloads: when set,
    every structural operation also maintains one concrete matrix per
    jacobian-holding vertex (used by the numeric verifier).  Value updates
    always rebind, never mutate arrays in place, so clones stay independent.
    """

    def __init__(self):
        self.x: set[Label] = set()
        self.y: set[Label] = set()
        self.z: dict[Label, LineVertex] = {}
        self.succ: dict[Label, set[Label]] = {}
        self.pred: dict[Label, set[Label]] = {}
        self.sizes: dict[int, int] = {}
        self.merge_log: list[tuple[Label, Label]] = []
        self.values: dict[Label, object] | None = None
        self.elem_values: dict[Label, object] | None = None

    def clone(self) -> "LineDag":
        other = LineDag()
        other.x = set(self.x)
        other.y = set(self.y)
        other.z = {k: v.copy() for k, v in self.z.items()}
        other.succ = {k: set(v) for k, v in self.succ.items()}
        other.pred = {k: set(v) for k, v in self.pred.items()}
        other.sizes = self.sizes
        other.merge_log = list(self.merge_log)
        other.values = dict(self.values) if self.values is not None else None
        other.elem_values = self.elem_values
        return other

    # -- structure ---------------------------------------------------------

    def add_vertex(self, vert: LineVertex) -> None:
        self.z[vert.label] = vert
        self.succ[vert.label] = set()
        self.pred[vert.label] = set()

    def add_edge(self, u: Label, v: Label) -> None:
        self.succ[u].add(v)
        self.pred[v].add(u)

    def remove_edge(self, u: Label, v: Label) -> None:
        self.succ[u].discard(v)
        self.pred[v].discard(u)

    def drop_vertex(self, label: Label) -> None:
        for p in self.pred.pop(label):
            self.succ[p].discard(label)
        for s in self.succ.pop(label):
            self.pred[s].discard(label)
        del self.z[label]
        if self.values is not None:
            self.values.pop(label, None)

    # -- queries -----------------------------------------------------------

    def zz_edges(self) -> list[tuple[Label, Label]]:
        return sorted(
            (u, v)
            for u in self.z
            for v in self.succ[u]
            if v in self.z
        )

    def has_zz_edge(self, label: Label) -> bool:
        return any(v in self.z for v in self.succ[label]) or any(
            p in self.z for p in self.pred[label]
        )

    def pivots(self) -> set[int]:
        return {u[-1] for u, _ in self.zz_edges()}

    def state_key(self):
        return (
            tuple(sorted((l, v.jacobian) for l, v in self.z.items())),
            tuple(self.zz_edges()),
        )


def build_line_dag(dag: Dag) -> LineDag:
    ld = LineDag()
    ld.sizes = {v.index: v.vector_size for v in dag.vertices}
    ld.x = {(i,) for i in dag.inputs}
    ld.y = {(j,) for j in dag.outputs}
    for label in sorted(ld.x | ld.y):
        ld.succ.setdefault(label, set())
        ld.pred.setdefault(label, set())
    for e in dag.edges:
        ld.add_vertex(
            LineVertex(
                label=(e.source, e.target),
                rows=dag.size(e.target),
                cols=dag.size(e.source),
                jacobian=e.has_jacobian,
                tangent_cost=e.tangent_cost,
                adjoint_cost=e.adjoint_cost,
            )
        )
    for (i, j) in dag.edge_map:
        for k in dag.succ[j]:
            ld.add_edge((i, j), (j, k))
        if i in dag.inputs:
            ld.add_edge((i,), (i, j))
        if j in dag.outputs:
            ld.add_edge((i, j), (j,))
    return ld


def is_complete(ld: LineDag) -> bool:
    """No intermediate edges left and every surviving vertex holds its block."""
    if any(v in ld.z for u in ld.z for v in ld.succ[u]):
        return False
    return all(v.jacobian for v in ld.z.values())


@dataclass(frozen=True)
class Action:
    """One search move: an edge elimination (optionally with the preaccumulations
    that make its flavor admissible) or a standalone finalization."""

    kind: str  # "eliminate" | "finalize"
    mode: str | None
    edge: tuple[Label, Label] | None = None
    vertex: Label | None = None
    preaccs: tuple[Label, ...] = ()

    @property
    def target_label(self) -> Label:
        if self.kind == "finalize":
            return self.vertex
        u, v = self.edge
        return u + v[1:]

    @property
    def sort_key(self):
        if self.kind == "finalize":
            return (self.vertex, -1)
        return (self.target_label, MODE_RANK[self.mode])

    @property
    def footprint(self) -> frozenset[int]:
        if self.kind == "finalize":
            return frozenset((self.vertex[0], self.vertex[-1]))
        u, v = self.edge
        return frozenset((u[0], u[-1], v[-1]))


def eliminatable_targets(ld: LineDag) -> list[Action]:
    """All admissible moves: direct eliminations per flavor, eliminations fused
    with the preaccumulations they require, and finalizing preaccumulations of
    elementals that no longer touch any intermediate edge."""
    actions: list[Action] = []
    for u, v in ld.zz_edges():
        U, V = ld.z[u], ld.z[v]
        ju, jv = U.jacobian, V.jacobian
        mu, mv = U.is_elemental, V.is_elemental
        if mv:  # tangent flavor propagates through v's model
            if ju:
                actions.append(Action("eliminate", "TAN", edge=(u, v)))
            elif mu:
                actions.append(Action("eliminate", "TAN", edge=(u, v), preaccs=(u,)))
        if mu:  # adjoint flavor propagates through u's model
            if jv:
                actions.append(Action("eliminate", "ADJ", edge=(u, v)))
            elif mv:
                actions.append(Action("eliminate", "ADJ", edge=(u, v), preaccs=(v,)))
        if (ju or mu) and (jv or mv):
            pre = tuple(w for w, j in ((u, ju), (v, jv)) if not j)
            actions.append(Action("eliminate", "MUL", edge=(u, v), preaccs=pre))
    for label in sorted(ld.z):
        vert = ld.z[label]
        if vert.is_elemental and not vert.jacobian and not ld.has_zz_edge(label):
            actions.append(Action("finalize", None, vertex=label))
    actions.sort(key=lambda a: a.sort_key)
    return actions
