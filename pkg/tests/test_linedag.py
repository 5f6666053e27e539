"""Line dag construction and structural queries."""

from hypothesis import given, settings
from hypothesis import strategies as st

from facelim.corpus import with_all_jacobians
from facelim.graph import Dag, DagEdge, DagVertex
from facelim.linedag import build_line_dag, eliminatable_targets, is_complete
from facelim.engine import apply_action
from conftest import random_dag


def brute_force_zz(dag):
    """Independent oracle: composable edge pairs of the original dag."""
    return sorted(
        ((i, j), (j2, k))
        for (i, j) in dag.edge_map
        for (j2, k) in dag.edge_map
        if j == j2
    )


class TestConstruction:
    def test_bat_shape(self, bat_dag):
        ld = build_line_dag(bat_dag)
        assert len(ld.x) == 2
        assert len(ld.z) == 9
        assert len(ld.y) == 3
        assert len(ld.zz_edges()) == 10
        x_edges = sum(1 for x in ld.x for _ in ld.succ[x])
        y_edges = sum(1 for z in ld.z for s in ld.succ[z] if s in ld.y)
        assert x_edges == 2
        assert y_edges == 5

    def test_single_edge(self):
        dag = Dag([DagVertex(0, 1), DagVertex(1, 1)], [DagEdge(0, 1, 1, 1)])
        ld = build_line_dag(dag)
        assert set(ld.z) == {(0, 1)}
        assert ld.zz_edges() == []

    def test_lion_intermediate_edges(self, lion_dag):
        ld = build_line_dag(lion_dag)
        assert ld.zz_edges() == [
            ((0, 1), (1, 2)),
            ((0, 1), (1, 3)),
            ((1, 2), (2, 3)),
            ((1, 2), (2, 4)),
            ((1, 2), (2, 5)),
        ]

    def test_inherits_costs_and_flags(self, lion_dag):
        ld = build_line_dag(with_all_jacobians(lion_dag))
        v = ld.z[(0, 1)]
        assert (v.rows, v.cols) == (1, 2)
        assert (v.tangent_cost, v.adjoint_cost) == (2, 4)
        assert v.jacobian

    @given(st.integers(0, 3000))
    @settings(max_examples=60, deadline=None)
    def test_matches_brute_force(self, seed):
        dag = random_dag(seed, max_intermediates=6)
        ld = build_line_dag(dag)
        assert len(ld.z) == len(dag.edges)
        assert ld.zz_edges() == brute_force_zz(dag)


class TestCompleteness:
    def test_fresh_lion_incomplete(self, lion_dag):
        assert not is_complete(build_line_dag(lion_dag))

    def test_bipartite_all_jacobian(self):
        dag = Dag(
            [DagVertex(0, 1), DagVertex(1, 2)],
            [DagEdge(0, 1, 1, 1, has_jacobian=True)],
        )
        assert is_complete(build_line_dag(dag))

    def test_bipartite_without_jacobian(self):
        dag = Dag([DagVertex(0, 1), DagVertex(1, 2)], [DagEdge(0, 1, 1, 1)])
        assert not is_complete(build_line_dag(dag))

    def test_complete_after_sparse_plan(self, lion_dag):
        from facelim.heuristics import plan_sparse_tangent
        from facelim.engine import replay_sequence

        plan = plan_sparse_tangent(lion_dag)
        _, ld, complete = replay_sequence(lion_dag, plan)
        assert complete


class TestTargets:
    def test_generalized_bat_all_fused(self, bat_dag):
        actions = eliminatable_targets(build_line_dag(bat_dag))
        elims = [a for a in actions if a.kind == "eliminate"]
        assert all(a.preaccs for a in elims), "nothing is directly eliminatable"
        assert len({a.edge for a in elims}) == 10

    def test_classical_bat_full_flavor_menu(self, bat_classical):
        actions = eliminatable_targets(build_line_dag(bat_classical))
        elims = [a for a in actions if a.kind == "eliminate"]
        assert all(not a.preaccs for a in elims)
        by_edge = {}
        for a in elims:
            by_edge.setdefault(a.edge, set()).add(a.mode)
        assert len(by_edge) == 10
        assert all(modes == {"TAN", "ADJ", "MUL"} for modes in by_edge.values())

    def test_complete_state_has_no_edge_actions(self):
        dag = Dag(
            [DagVertex(0, 1), DagVertex(1, 2)],
            [DagEdge(0, 1, 1, 1, has_jacobian=True)],
        )
        assert eliminatable_targets(build_line_dag(dag)) == []

    def test_finalization_only_without_incident_edges(self, newton1_dag):
        ld = build_line_dag(newton1_dag)
        finals = [a for a in eliminatable_targets(ld) if a.kind == "finalize"]
        # only the identity carry has no intermediate edges at the start
        assert [a.vertex for a in finals] == [(-1, 3)]

    @given(st.integers(0, 3000))
    @settings(max_examples=30, deadline=None)
    def test_rim_never_changes(self, seed):
        dag = random_dag(seed)
        ld = build_line_dag(dag)
        x0, y0 = set(ld.x), set(ld.y)
        for _ in range(40):
            actions = eliminatable_targets(ld)
            if not actions:
                break
            apply_action(ld, actions[0])
            assert ld.x == x0 and ld.y == y0
        assert is_complete(ld)
