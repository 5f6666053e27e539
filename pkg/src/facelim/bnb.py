"""Deterministic anytime branch and bound for minimal-cost elimination plans.

Depth-first search over the moves from ``eliminatable_targets`` with

  * an admissible lower bound: every original index that still pivots an
    intermediate edge forces at least one elimination across that pivot
    (eliminations are the only place blocks multiply, and a crossing's pivot
    never changes under merges or fill handover), so summing the cheapest
    conceivable crossing per pivot never exceeds the true remaining cost;
  * greedy completions as incumbents, seeded with the best of the three
    heuristics so pruning is active from the first node;
  * two optimality-preserving compressions: commuting sibling moves are
    explored in one fixed order only, and preaccumulation occurs solely
    fused ahead of an elimination of an incident edge or as finalization;
  * a dominance memo over elimination states: a revisit arriving at higher
    cost is cut, a revisit at equal cost only when its ordering context
    matches (so the canonical ordering kept by the compression survives).

With a wall-clock budget the search returns the incumbent and flags the
result as unproven.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from .graph import Dag
from .linedag import Action, Label, LineDag, build_line_dag, eliminatable_targets, is_complete
from .engine import EngineError, Plan, PlanStep, apply_action
from .heuristics import (
    greedy_complete,
    plan_greedy_min_fill,
    plan_sparse_adjoint,
    plan_sparse_tangent,
)

_MEMO_CAP = 4_000_000
_GREEDY_DEPTH = 2      # run a greedy completion on every node this shallow
_GREEDY_EVERY = 512    # and on every n-th visited node below that


@dataclass
class SearchStats:
    nodes_generated: int = 0
    nodes_visited: int = 0
    nodes_pruned: int = 0
    incumbent_cost: int | None = None
    proven_optimal: bool = False
    elapsed_s: float = 0.0
    incumbent_history: list[tuple[int, int]] = field(default_factory=list)


_INF = float("inf")


class PivotBounds:
    """Admissible remaining-cost floors, one per pivot index.

    Blocks only ever multiply inside eliminations, and a pending edge's
    pivot survives merges and fill handover, so every pivot with pending
    intermediate edges forces at least one crossing whose cost is floored
    by path-connected minimum widths (``single``).  Two stronger counts
    sharpen this:

      * a vertex whose source is an input can never hand its pending
        out-edges to anything else (it has no in-edges to be reincarnated
        through), so each such (source, pivot) pair forces its own
        elimination, paying its preaccumulation unless a block is already
        present or the adjoint model route is cheaper;
      * symmetrically for vertices whose sink is an output;
      * sources only ever move up to ancestors and sinks down to
        descendants, so endpoint groups with disjoint reach can never be
        merged and each group forces a separate crossing.

    The per-pivot contribution is the max of the three readings; maxima
    are safe because one crossing may serve several readings at once.
    """

    def __init__(self, dag: Dag):
        self.dag = dag
        self.inputs = set(dag.inputs)
        self.outputs = set(dag.outputs)
        self.size = {i: dag.size(i) for i in dag.vertex_map}
        self._memo_up: dict = {}
        self._memo_dn: dict = {}
        self.accmin = {
            e.key: min(
                self.size[e.source] * e.tangent_cost,
                self.size[e.target] * e.adjoint_cost,
            )
            for e in dag.edges
        }
        self.dminup: dict[int, int] = {}
        self.dmindn: dict[int, int] = {}
        self.tmin_out: dict[int, int] = {}
        self.amin_in: dict[int, int] = {}
        self.single: dict[int, int] = {}
        for j in dag.vertex_map:
            ins = [dag.edge_map[(i, j)] for i in dag.pred[j]]
            outs = [dag.edge_map[(j, k)] for k in dag.succ[j]]
            if not ins or not outs:
                continue
            up = min(self.size[a] for a in dag.ancestors(j))
            dn = min(self.size[d] for d in dag.descendants(j))
            self.dminup[j] = up
            self.dmindn[j] = dn
            self.tmin_out[j] = min(e.tangent_cost for e in outs)
            self.amin_in[j] = min(e.adjoint_cost for e in ins)
            self.single[j] = min(
                up * self.tmin_out[j],
                dn * self.amin_in[j],
                up * self.size[j] * dn,
            )

    def _min_classes(self, indices, terminal, step, memo) -> int:
        """Fewest pending-edge classes a set of endpoint indices can reach.

        A class keyed by endpoint index disappears only through an
        elimination of its own, or by dissolving its vertex, which replaces
        the class with one class per graph-neighbor on that side (new
        classes merge with existing equal-index ones).  Terminal indices
        (inputs upward, outputs downward) cannot dissolve.
        """
        key = frozenset(indices)
        if key in memo:
            return memo[key]
        best = len(key)
        memo[key] = best  # cut cycles conservatively; dag reach keeps this exact
        for i in key:
            if i in terminal:
                continue
            nxt = (key - {i}) | step(i)
            best = min(best, self._min_classes(nxt, terminal, step, memo))
        memo[key] = best
        return best

    def groups_up(self, sources) -> int:
        return self._min_classes(
            set(sources), self.inputs, lambda i: self.dag.pred[i], self._memo_up
        )

    def groups_dn(self, sinks) -> int:
        return self._min_classes(
            set(sinks), self.outputs, lambda i: self.dag.succ[i], self._memo_dn
        )

    def contribution_map(
        self, ld: LineDag, only: set[int] | None = None
    ) -> dict[int, int]:
        """Per-pivot floor contributions; ``only`` restricts to some pivots.

        Contributions depend only on class-level pivot structure (endpoint
        index sets, block presence per class), which an elimination leaves
        untouched at every pivot outside its index footprint, so cached
        values can be carried over across a move.
        """
        by_pivot: dict[int, list[tuple[Label, Label]]] = {}
        for u, v in ld.zz_edges():
            j = u[-1]
            if only is None or j in only:
                by_pivot.setdefault(j, []).append((u, v))
        out: dict[int, int] = {}
        for j, edges in by_pivot.items():
            lefts = {u for u, _ in edges}
            rights = {v for _, v in edges}
            g = self.groups_up(u[0] for u in lefts)
            h = self.groups_dn(v[-1] for v in rights)
            best = self.single[j] * max(g, h)

            sum_l = 0
            for s in {u[0] for u in lefts if u[0] in self.inputs}:
                mine = [u for u in lefts if u[0] == s]
                hconn = self.groups_dn(v[-1] for u, v in edges if u[0] == s)
                enable = (
                    0
                    if any(ld.z[u].jacobian for u in mine)
                    else self.accmin[(s, j)]
                )
                each_tan = self.size[s] * self.tmin_out[j]
                each_mul = self.size[s] * self.size[j] * self.dmindn[j]
                each_adj = (
                    self.dmindn[j] * self.dag.edge_map[(s, j)].adjoint_cost
                    if (s, j) in self.dag.edge_map
                    else _INF
                )
                sum_l += min(
                    hconn * each_adj,
                    enable + hconn * min(each_tan, each_mul, each_adj),
                )
            best = max(best, sum_l)

            sum_r = 0
            for t in {v[-1] for v in rights if v[-1] in self.outputs}:
                mine = [v for v in rights if v[-1] == t]
                gconn = self.groups_up(u[0] for u, v in edges if v[-1] == t)
                enable = (
                    0
                    if any(ld.z[v].jacobian for v in mine)
                    else self.accmin[(j, t)]
                )
                each_tan = (
                    self.dminup[j] * self.dag.edge_map[(j, t)].tangent_cost
                    if (j, t) in self.dag.edge_map
                    else _INF
                )
                each_mul = self.dminup[j] * self.size[j] * self.size[t]
                each_adj = self.size[t] * self.amin_in[j]
                sum_r += min(
                    gconn * each_tan,
                    enable + gconn * min(each_tan, each_mul, each_adj),
                )
            out[j] = int(max(best, sum_r))
        return out

    def remaining(self, ld: LineDag) -> int:
        return sum(self.contribution_map(ld).values())


def pivot_bounds(dag: Dag) -> PivotBounds:
    return PivotBounds(dag)


def lower_bound(ld: LineDag, cost_so_far: int, bounds: PivotBounds) -> int:
    return cost_so_far + bounds.remaining(ld)


def upper_bound_completion(ld: LineDag) -> list[PlanStep]:
    """Greedy completion of a search state, used as an incumbent candidate.
    Greedy cannot stall by construction; the fallback only guards against
    engine regressions."""
    trial = ld.clone()
    try:
        return greedy_complete(trial)
    except EngineError:
        trial = ld.clone()
        steps: list[PlanStep] = []
        while True:
            actions = eliminatable_targets(trial)
            if not actions:
                return steps
            steps.extend(apply_action(trial, actions[0]))


def _independent(a: Action, b: Action) -> bool:
    """Conservative commutation test.

    Two eliminations across the same pivot commute: neither can remove or
    re-link the other's endpoints, change its flags or costs, or steal its
    absorb candidates (those would need a source or sink equal to the pivot,
    which acyclicity forbids).  The one exception is a preaccumulation on an
    endpoint that shares its end indices with the sibling's distinct
    endpoint: the fresh block can merge that endpoint away, so such pairs
    stay ordered.  Everything else must keep the whole (source, pivot, sink)
    index footprints disjoint: a preaccumulation can turn its vertex into an
    absorb target for any face with the same end indices, which makes
    orderings cost-divergent even when the incident vertex sets are
    disjoint.
    """
    if a.kind == "eliminate" and b.kind == "eliminate":
        (u1, v1), (u2, v2) = a.edge, b.edge
        if u1[-1] == u2[-1] and (u1, v1) != (u2, v2):
            safe = True
            if (u1 in a.preaccs or u2 in b.preaccs) and u1 != u2 and u1[0] == u2[0]:
                safe = False
            if (v1 in a.preaccs or v2 in b.preaccs) and v1 != v2 and v1[-1] == v2[-1]:
                safe = False
            if safe:
                return True
    return a.footprint.isdisjoint(b.footprint)


class _Incumbent:
    def __init__(self, steps: list[PlanStep], cost: int):
        self.steps = steps
        self.cost = cost
        self.lock = threading.Lock()
        self.history: list[tuple[int, int]] = [(0, cost)]

    def offer(self, steps: list[PlanStep], cost: int, visited: int) -> None:
        with self.lock:
            if cost < self.cost:
                self.steps, self.cost = steps, cost
                self.history.append((visited, cost))


@dataclass
class _Node:
    ld: LineDag
    steps: tuple[PlanStep, ...]
    cost: int
    depth: int
    action: Action | None
    pivot_map: dict[int, int]

    @property
    def bound(self) -> int:
        return self.cost + sum(self.pivot_map.values())


class _Solver:
    def __init__(self, dag: Dag, budget: float | None, workers: int):
        self.dag = dag
        self.budget = budget
        self.workers = max(1, workers)
        self.t0 = time.perf_counter()
        heuristics = [
            plan_sparse_tangent(dag),
            plan_sparse_adjoint(dag),
            plan_greedy_min_fill(dag),
        ]
        best = min(heuristics, key=lambda p: p.total_cost)
        self.incumbent = _Incumbent(list(best.steps), best.total_cost)
        self.bounds = pivot_bounds(dag)
        self.stats = SearchStats(nodes_generated=1)
        self.memo: dict[object, int] = {}
        self.lock = threading.Lock()
        self.expired = False

    # static step costs, used to pre-filter children before cloning

    def _model(self, label: Label):
        return self.dag.edge_map[label]

    def _acc_cost(self, label: Label) -> int:
        e = self._model(label)
        return min(
            self.dag.size(label[0]) * e.tangent_cost,
            self.dag.size(label[1]) * e.adjoint_cost,
        )

    def action_cost(self, action: Action) -> int:
        if action.kind == "finalize":
            return self._acc_cost(action.vertex)
        cost = sum(self._acc_cost(w) for w in action.preaccs)
        u, v = action.edge
        if action.mode == "TAN":
            cost += self.dag.size(u[0]) * self._model(v).tangent_cost
        elif action.mode == "ADJ":
            cost += self.dag.size(v[-1]) * self._model(u).adjoint_cost
        else:
            cost += (
                self.dag.size(u[0]) * self.dag.size(u[-1]) * self.dag.size(v[-1])
            )
        return cost

    def out_of_time(self) -> bool:
        if self.budget is not None and time.perf_counter() - self.t0 > self.budget:
            self.expired = True
        return self.expired

    def expand(self, node: _Node) -> list[_Node]:
        actions = eliminatable_targets(node.ld)
        if not actions:
            if is_complete(node.ld):
                self.incumbent.offer(
                    list(node.steps), node.cost, self.stats.nodes_visited
                )
            return []
        children: list[_Node] = []
        parent_pivots = node.ld.pivots()
        run_greedy = (
            node.depth <= _GREEDY_DEPTH
            or self.stats.nodes_visited % _GREEDY_EVERY == 0
        )
        # Ordering compression is sound together with the dominance memo
        # because single-worker DFS visits arrival paths in lex order, so
        # the first equal-cost arrival at a state is the lex-smallest and
        # its subtree covers the rest.  Parallel schedules lose that order;
        # they drop the skips and rely on the memo alone, which collapses
        # commuting permutations one level later.
        last = node.action if self.workers == 1 else None
        for action in actions:
            if (
                last is not None
                and action.sort_key < last.sort_key
                and _independent(action, last)
            ):
                continue  # commuting sibling already explored in sorted order
            acost = self.action_cost(action)
            ccost = node.cost + acost
            fp = action.footprint
            carried = {
                j: c for j, c in node.pivot_map.items() if j not in fp
            }
            with self.lock:
                self.stats.nodes_generated += 1
            if ccost + sum(carried.values()) >= self.incumbent.cost:
                with self.lock:
                    self.stats.nodes_pruned += 1
                continue
            child_ld = node.ld.clone()
            delta = apply_action(child_ld, action)
            assert sum(s.cost for s in delta) == acost
            child_map = carried
            child_map.update(self.bounds.contribution_map(child_ld, only=fp))
            if ccost + sum(child_map.values()) >= self.incumbent.cost:
                with self.lock:
                    self.stats.nodes_pruned += 1
                continue
            key = child_ld.state_key()
            with self.lock:
                cached = self.memo.get(key)
                if cached is not None and cached <= ccost:
                    self.stats.nodes_pruned += 1
                    continue
                if len(self.memo) < _MEMO_CAP:
                    self.memo[key] = ccost
            child = _Node(
                child_ld,
                node.steps + tuple(delta),
                ccost,
                node.depth + 1,
                action,
                child_map,
            )
            if run_greedy:
                suffix = upper_bound_completion(child_ld)
                self.incumbent.offer(
                    list(child.steps) + suffix,
                    ccost + sum(s.cost for s in suffix),
                    self.stats.nodes_visited,
                )
            children.append(child)
        return children

    def root(self) -> _Node:
        ld = build_line_dag(self.dag)
        return _Node(ld, (), 0, 0, None, self.bounds.contribution_map(ld))

    def run_single(self) -> None:
        stack: list[_Node] = [self.root()]
        check = 0
        while stack:
            check += 1
            if check % 64 == 0 and self.out_of_time():
                break
            node = stack.pop()
            self.stats.nodes_visited += 1
            if node.bound >= self.incumbent.cost:
                self.stats.nodes_pruned += 1
                continue
            stack.extend(reversed(self.expand(node)))

    def run_parallel(self) -> None:
        stack: list[_Node] = [self.root()]
        state = {"active": 0}
        ready = threading.Condition()

        def worker():
            while True:
                with ready:
                    while not stack and state["active"] and not self.expired:
                        ready.wait(0.02)
                    if self.expired or (not stack and not state["active"]):
                        ready.notify_all()
                        return
                    if not stack:
                        continue
                    node = stack.pop()
                    state["active"] += 1
                with self.lock:
                    self.stats.nodes_visited += 1
                try:
                    if self.out_of_time():
                        return
                    if node.bound < self.incumbent.cost:
                        children = self.expand(node)
                        with ready:
                            stack.extend(reversed(children))
                            ready.notify_all()
                    else:
                        with self.lock:
                            self.stats.nodes_pruned += 1
                finally:
                    with ready:
                        state["active"] -= 1
                        ready.notify_all()

        threads = [threading.Thread(target=worker) for _ in range(self.workers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()


def solve_branch_and_bound(
    dag: Dag,
    budget: float | None = None,
    workers: int = 1,
    seed: int = 0,
) -> tuple[Plan, SearchStats]:
    """Minimal-cost complete plan, or the best incumbent when the budget
    runs out.  ``seed`` is accepted for interface stability; the search is
    deterministic and does not use it."""
    del seed
    solver = _Solver(dag, budget, workers)
    if workers <= 1:
        solver.run_single()
    else:
        solver.run_parallel()
    stats = solver.stats
    stats.incumbent_cost = solver.incumbent.cost
    stats.proven_optimal = not solver.expired
    stats.elapsed_s = time.perf_counter() - solver.t0
    stats.incumbent_history = solver.incumbent.history
    return Plan(list(solver.incumbent.steps)), stats
