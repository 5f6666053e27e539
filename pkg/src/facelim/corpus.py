"""Benchmark dags used throughout the tests, scripts and shipped fixtures.

The lion and bat dags are the classic 6- and 8-vertex elimination benchmarks
with vector sizes and per-edge tangent/adjoint run times; ``newton(k)`` is
the dag of k chained inexact-Newton update steps (state and parameters in,
updated state out), whose Jacobian-of-residual vertex is n*n wide and whose
direct state-carry edge is a zero-cost identity.
"""

from __future__ import annotations

from .graph import Dag, DagEdge, DagVertex


def bat() -> Dag:
    vertices = [
        DagVertex(-1, 2), DagVertex(0, 2), DagVertex(1, 1), DagVertex(2, 1),
        DagVertex(3, 1), DagVertex(4, 1), DagVertex(5, 2), DagVertex(6, 1),
    ]
    edges = [
        DagEdge(-1, 1, 2, 4),
        DagEdge(0, 2, 2, 4),
        DagEdge(1, 3, 1, 2),
        DagEdge(1, 4, 1, 2),
        DagEdge(2, 3, 1, 2),
        DagEdge(2, 6, 1, 2),
        DagEdge(3, 4, 1, 2),
        DagEdge(3, 5, 2, 4),
        DagEdge(3, 6, 1, 2),
    ]
    return Dag(vertices, edges)


def lion() -> Dag:
    # Subgraph of bat reachable from -1, reindexed -1->0, 3->2, 4->3, 5->4, 6->5.
    vertices = [
        DagVertex(0, 2), DagVertex(1, 1), DagVertex(2, 1),
        DagVertex(3, 1), DagVertex(4, 2), DagVertex(5, 1),
    ]
    edges = [
        DagEdge(0, 1, 2, 4),
        DagEdge(1, 2, 1, 2),
        DagEdge(1, 3, 1, 2),
        DagEdge(2, 3, 1, 2),
        DagEdge(2, 4, 2, 4),
        DagEdge(2, 5, 1, 2),
    ]
    return Dag(vertices, edges)


def with_all_jacobians(dag: Dag) -> Dag:
    """Classical variant: every elemental Jacobian given up front."""
    return Dag(
        dag.vertices,
        [
            DagEdge(e.source, e.target, e.tangent_cost, e.adjoint_cost,
                    has_jacobian=True, jacobian_kind=e.jacobian_kind)
            for e in dag.edges
        ],
    )


def newton(steps: int = 1, n: int = 10) -> Dag:
    """Dag of ``steps`` chained Newton updates for an n-dimensional state with
    n parameters.  Vertex -1 is the incoming state, 0 the parameters; step s
    adds the residual Jacobian (width n*n), the residual (width n) and the
    updated state (width n)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    vertices = [DagVertex(-1, n), DagVertex(0, n)]
    edges = []
    state = -1
    for s in range(steps):
        jac, res, new_state = 3 * s + 1, 3 * s + 2, 3 * s + 3
        vertices += [
            DagVertex(jac, n * n), DagVertex(res, n), DagVertex(new_state, n)
        ]
        edges += [
            DagEdge(state, jac, 2000, 4000),
            DagEdge(0, jac, 2000, 4000),
            DagEdge(state, res, 200, 400),
            DagEdge(0, res, 200, 400),
            DagEdge(state, new_state, 0, 0, jacobian_kind="identity"),
            DagEdge(jac, new_state, 1000, 2000),
            DagEdge(res, new_state, 800, 1600),
        ]
        state = new_state
    return Dag(vertices, edges)
