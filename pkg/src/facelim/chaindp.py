"""Dynamic-programming oracle for single-path dags.

For a chain F = F_q o ... o F_1 with widths d_0..d_q and per-elemental
tangent/adjoint run times, the optimal mixed strategy is an interval DP:
an interval's block is obtained by preaccumulating a single elemental,
propagating an accumulated prefix through the remaining tangents, pulling
an accumulated suffix through the remaining adjoints, or multiplying two
sub-blocks explicitly.  The recurrence is validated against exhaustive
strategy enumeration before being trusted as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Dag, DagEdge, DagVertex, GraphError
from .engine import Plan, PlanStep


class ChainError(Exception):
    pass


class ChainTooLong(ChainError):
    pass


@dataclass(frozen=True)
class ChainSpec:
    dims: tuple[int, ...]      # d_0 .. d_q
    tangent: tuple[int, ...]   # T_1 .. T_q
    adjoint: tuple[int, ...]   # A_1 .. A_q

    def __post_init__(self):
        if len(self.dims) < 2:
            raise ChainError("a chain needs at least one elemental")
        if len(self.tangent) != self.q or len(self.adjoint) != self.q:
            raise ChainError("cost vectors must have one entry per elemental")
        if any(d < 1 for d in self.dims):
            raise ChainError("all widths must be >= 1")
        if any(c < 0 for c in self.tangent + self.adjoint):
            raise ChainError("costs must be >= 0")

    @property
    def q(self) -> int:
        return len(self.dims) - 1

    def reversed(self) -> "ChainSpec":
        return ChainSpec(
            dims=self.dims[::-1],
            tangent=self.adjoint[::-1],
            adjoint=self.tangent[::-1],
        )


def chain_as_dag(spec: ChainSpec) -> Dag:
    vertices = [DagVertex(i, spec.dims[i]) for i in range(spec.q + 1)]
    edges = [
        DagEdge(l - 1, l, spec.tangent[l - 1], spec.adjoint[l - 1])
        for l in range(1, spec.q + 1)
    ]
    return Dag(vertices, edges)


def chain_from_dag(dag: Dag) -> ChainSpec:
    """Accept only single-path dags: one input, one output, degree <= 1."""
    order = dag.topological_order()
    for i in dag.vertex_map:
        if len(dag.succ[i]) > 1 or len(dag.pred[i]) > 1:
            raise ChainError(f"vertex {i} has degree > 1; not a chain")
    if len(dag.inputs) != 1 or len(dag.outputs) != 1 or len(dag.edges) != len(order) - 1:
        raise ChainError("dag is not a single path")
    dims = tuple(dag.size(i) for i in order)
    tangent, adjoint = [], []
    for a, b in zip(order, order[1:]):
        if (a, b) not in dag.edge_map:
            raise ChainError("dag is not a single path")
        e = dag.edge_map[(a, b)]
        tangent.append(e.tangent_cost)
        adjoint.append(e.adjoint_cost)
    return ChainSpec(dims, tuple(tangent), tuple(adjoint))


def chain_from_text(text: str) -> ChainSpec:
    """Plain format: one line q, one line of q+1 dims, one line of tangent
    costs, one line of adjoint costs."""
    rows = [r.split() for r in text.splitlines() if r.strip() and not r.lstrip().startswith("#")]
    if len(rows) != 4 or len(rows[0]) != 1:
        raise ChainError("expected 4 lines: q / dims / tangent costs / adjoint costs")
    try:
        q = int(rows[0][0])
        dims = tuple(int(x) for x in rows[1])
        tan = tuple(int(x) for x in rows[2])
        adj = tuple(int(x) for x in rows[3])
    except ValueError as exc:
        raise ChainError(f"non-integer entry: {exc}") from None
    if len(dims) != q + 1:
        raise ChainError(f"expected {q + 1} dims, got {len(dims)}")
    return ChainSpec(dims, tan, adj)


# ---------------------------------------------------------------------------
# strategy trees
#
#   ("leaf", l, "TAN"|"ADJ")   preaccumulate elemental l
#   ("tprop", sub, l)          push sub's block through elemental l's tangent
#   ("aprop", sub, l)          pull sub's block through elemental l's adjoint
#   ("mul", left, right)       explicit product of adjacent blocks


def _tree_cost(spec: ChainSpec, tree) -> int:
    d, T, A = spec.dims, spec.tangent, spec.adjoint
    kind = tree[0]
    if kind == "leaf":
        _, l, mode = tree
        return d[l - 1] * T[l - 1] if mode == "TAN" else d[l] * A[l - 1]
    if kind == "tprop":
        _, sub, l = tree
        return _tree_cost(spec, sub) + d[_span(sub)[0] - 1] * T[l - 1]
    if kind == "aprop":
        _, sub, l = tree
        return _tree_cost(spec, sub) + d[_span(sub)[1]] * A[l - 1]
    _, lt, rt = tree
    return (
        _tree_cost(spec, lt)
        + _tree_cost(spec, rt)
        + d[_span(lt)[0] - 1] * d[_span(lt)[1]] * d[_span(rt)[1]]
    )


def _span(tree) -> tuple[int, int]:
    kind = tree[0]
    if kind == "leaf":
        return tree[1], tree[1]
    if kind == "tprop":
        lo, _ = _span(tree[1])
        return lo, tree[2]
    if kind == "aprop":
        _, hi = _span(tree[1])
        return tree[2], hi
    lo, _ = _span(tree[1])
    _, hi = _span(tree[2])
    return lo, hi


def _tree_plan(spec: ChainSpec, tree) -> list[PlanStep]:
    """Flatten a strategy into engine steps on chain_as_dag's 0..q labels."""
    d, T, A = spec.dims, spec.tangent, spec.adjoint
    kind = tree[0]
    if kind == "leaf":
        _, l, mode = tree
        cost = d[l - 1] * T[l - 1] if mode == "TAN" else d[l] * A[l - 1]
        return [PlanStep("ACC", mode, (l - 1, l), cost)]
    if kind == "tprop":
        _, sub, l = tree
        steps = _tree_plan(spec, sub)
        lo, hi = _span(sub)
        face = tuple(range(lo - 1, hi + 1)) + (l,)
        return steps + [PlanStep("ELI", "TAN", face, d[lo - 1] * T[l - 1])]
    if kind == "aprop":
        _, sub, l = tree
        steps = _tree_plan(spec, sub)
        lo, hi = _span(sub)
        face = (l - 1,) + tuple(range(lo - 1, hi + 1))
        return steps + [PlanStep("ELI", "ADJ", face, d[hi] * A[l - 1])]
    _, lt, rt = tree
    llo, lhi = _span(lt)
    rlo, rhi = _span(rt)
    face = tuple(range(llo - 1, rhi + 1))
    cost = d[llo - 1] * d[lhi] * d[rhi]
    return _tree_plan(spec, lt) + _tree_plan(spec, rt) + [PlanStep("ELI", "MUL", face, cost)]


def optimize_chain(spec: ChainSpec) -> tuple[int, Plan]:
    """Interval DP over the chain; returns the optimal cost and a plan that
    replays to it on chain_as_dag(spec)."""
    d, T, A = spec.dims, spec.tangent, spec.adjoint
    q = spec.q
    sumT = [0] * (q + 1)
    sumA = [0] * (q + 1)
    for l in range(1, q + 1):
        sumT[l] = sumT[l - 1] + T[l - 1]
        sumA[l] = sumA[l - 1] + A[l - 1]

    best: dict[tuple[int, int], tuple[int, tuple]] = {}
    for l in range(1, q + 1):
        cands = [
            (d[l - 1] * T[l - 1], ("leaf", l, "TAN")),
            (d[l] * A[l - 1], ("leaf", l, "ADJ")),
        ]
        best[(l, l)] = min(cands, key=lambda c: c[0])
    for length in range(2, q + 1):
        for i in range(1, q - length + 2):
            j = i + length - 1
            cands: list[tuple[int, tuple]] = []
            sweep_t = ("leaf", i, "TAN")
            for l in range(i + 1, j + 1):
                sweep_t = ("tprop", sweep_t, l)
            cands.append((d[i - 1] * (sumT[j] - sumT[i - 1]), sweep_t))
            sweep_a = ("leaf", j, "ADJ")
            for l in range(j - 1, i - 1, -1):
                sweep_a = ("aprop", sweep_a, l)
            cands.append((d[j] * (sumA[j] - sumA[i - 1]), sweep_a))
            for k in range(i, j):
                cl, tl = best[(i, k)]
                cr, tr = best[(k + 1, j)]
                cands.append((cl + cr + d[j] * d[k] * d[i - 1], ("mul", tl, tr)))
                tp = tl
                for l in range(k + 1, j + 1):
                    tp = ("tprop", tp, l)
                cands.append((cl + d[i - 1] * (sumT[j] - sumT[k]), tp))
                ap = tr
                for l in range(k, i - 1, -1):
                    ap = ("aprop", ap, l)
                cands.append((cr + d[j] * (sumA[k] - sumA[i - 1]), ap))
            best[(i, j)] = min(cands, key=lambda c: c[0])
    cost, tree = best[(1, q)]
    return cost, Plan(_tree_plan(spec, tree))


def enumerate_chain_strategies(spec: ChainSpec, limit: int = 6) -> list[tuple[int, tuple]]:
    """Exhaustive list of (cost, strategy) over all bracketings and leaf
    modes; guarded because the count grows super-exponentially."""
    if spec.q > limit:
        raise ChainTooLong(f"q={spec.q} exceeds enumeration guard {limit}")

    def gen(i: int, j: int):
        if i == j:
            yield ("leaf", i, "TAN")
            yield ("leaf", i, "ADJ")
            return
        for k in range(i, j):
            for lt in gen(i, k):
                for rt in gen(k + 1, j):
                    yield ("mul", lt, rt)
        for sub in gen(i, j - 1):
            yield ("tprop", sub, j)
        for sub in gen(i + 1, j):
            yield ("aprop", sub, i)

    return [(_tree_cost(spec, t), t) for t in gen(1, spec.q)]
