#!/usr/bin/env python3
"""Reproduce the per-method cost tuples for the benchmark dags.

Prints one row per dag with the costs of
(DenseTangent, DenseAdjoint, SparseTangent, SparseAdjoint, GreedyMinFill,
BranchAndBound).  Branch and bound runs with the given budget and marks
unproven results with '*'.
"""

import argparse

from facelim.bnb import solve_branch_and_bound
from facelim.corpus import bat, lion, newton, with_all_jacobians
from facelim.graph import dense_adjoint_cost, dense_tangent_cost
from facelim.heuristics import (
    plan_greedy_min_fill,
    plan_sparse_adjoint,
    plan_sparse_tangent,
)


def row(name, dag, budget, threads):
    dense_t = dense_tangent_cost(dag)
    dense_a = dense_adjoint_cost(dag)
    st = plan_sparse_tangent(dag).total_cost
    sa = plan_sparse_adjoint(dag).total_cost
    gr = plan_greedy_min_fill(dag).total_cost
    plan, stats = solve_branch_and_bound(dag, budget=budget, workers=threads)
    bb = f"{plan.total_cost}{'' if stats.proven_optimal else '*'}"
    print(f"{name:16s} ({dense_t}, {dense_a}, {st}, {sa}, {gr}, {bb})")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=float, default=60.0,
                        help="branch and bound budget per dag in seconds")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--newton-steps", type=int, nargs="*", default=[1],
                        help="also run these multi-step Newton dags")
    args = parser.parse_args()

    cases = [
        ("lion", lion()),
        ("bat", bat()),
        ("lion_classical", with_all_jacobians(lion())),
        ("bat_classical", with_all_jacobians(bat())),
    ]
    cases += [(f"newton{k}", newton(k)) for k in args.newton_steps]
    print(f"{'dag':16s} (dense tan, dense adj, sparse tan, sparse adj, greedy, bnb)")
    for name, dag in cases:
        row(name, dag, args.budget, args.threads)


if __name__ == "__main__":
    main()
