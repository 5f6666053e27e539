"""Numeric certification of plans against direct chain-rule propagation.

A plan is executed as concrete matrix algebra (tangent/adjoint applications
become multiplications by the instantiated elemental matrix) and its
surviving blocks are compared with dense forward propagation through the
original dag.  Relative tolerance 1e-8 absorbs summation-order differences
between plans.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Dag, GraphError
from .linedag import build_line_dag
from .engine import Plan, _replay_steps
from .linedag import is_complete


REL_TOL = 1e-8


class VerifyError(Exception):
    pass


class IncompletePlan(VerifyError):
    pass


@dataclass
class NumericInstance:
    seed: int
    matrices: dict[tuple[int, int], np.ndarray]


@dataclass
class Verdict:
    passed: bool
    worst_error: float
    worst_seed: int
    trials: int

    def render(self) -> str:
        word = "pass" if self.passed else "FAIL"
        return (
            f"{word} (max rel error {self.worst_error:.3e}, "
            f"seed {self.worst_seed}, trials {self.trials})"
        )


def instantiate_numeric(dag: Dag, seed: int) -> NumericInstance:
    """One dense matrix per original edge, uniform in [-1, 1] from a seeded
    generator; identity-kind edges get identity matrices."""
    rng = np.random.default_rng(seed)
    matrices: dict[tuple[int, int], np.ndarray] = {}
    for e in dag.edges:  # sorted, so draws are reproducible
        rows, cols = dag.size(e.target), dag.size(e.source)
        if e.jacobian_kind == "identity":
            if rows != cols:
                raise GraphError(
                    f"edge ({e.source},{e.target}): identity needs square shape"
                )
            matrices[e.key] = np.eye(rows)
        else:
            matrices[e.key] = rng.uniform(-1.0, 1.0, size=(rows, cols))
    return NumericInstance(seed=seed, matrices=matrices)


def reference_jacobian(dag: Dag, inst: NumericInstance) -> dict[tuple[int, int], np.ndarray]:
    """Dense forward propagation in topological order, one sweep per input;
    disconnected (input, output) pairs map to zero blocks."""
    order = dag.topological_order()
    result: dict[tuple[int, int], np.ndarray] = {}
    for s in dag.inputs:
        carry: dict[int, np.ndarray] = {s: np.eye(dag.size(s))}
        for j in order:
            if j == s:
                continue
            parts = [
                inst.matrices[(i, j)] @ carry[i]
                for i in sorted(dag.pred[j])
                if i in carry
            ]
            if parts:
                carry[j] = sum(parts[1:], parts[0])
        for t in dag.outputs:
            result[(s, t)] = carry.get(
                t, np.zeros((dag.size(t), dag.size(s)))
            )
    return result


def execute_sequence_numeric(
    dag: Dag, inst: NumericInstance, plan: Plan
) -> dict[tuple[int, int], np.ndarray]:
    """Replay the plan with a concrete matrix per jacobian-holding vertex and
    return the surviving input-to-output blocks."""
    ld = build_line_dag(dag)
    ld.elem_values = {e.key: inst.matrices[e.key] for e in dag.edges}
    ld.values = {
        e.key: inst.matrices[e.key] for e in dag.edges if e.has_jacobian
    }
    _replay_steps(ld, plan)
    if not is_complete(ld):
        raise IncompletePlan("final state is not a complete block layout")
    inputs, outputs = set(dag.inputs), set(dag.outputs)
    result: dict[tuple[int, int], np.ndarray] = {}
    for label, vert in ld.z.items():
        if vert.source in inputs and vert.sink in outputs:
            result[(vert.source, vert.sink)] = ld.values[label]
    for s in inputs:
        for t in outputs:
            result.setdefault((s, t), np.zeros((dag.size(t), dag.size(s))))
    return result


def block_error(
    got: dict[tuple[int, int], np.ndarray],
    want: dict[tuple[int, int], np.ndarray],
) -> float:
    """Worst blockwise Frobenius error, relative where the reference block
    is nonzero."""
    worst = 0.0
    for key, ref in want.items():
        diff = float(np.linalg.norm(got[key] - ref))
        norm = float(np.linalg.norm(ref))
        worst = max(worst, diff / norm if norm > 0 else diff)
    return worst


def verify_plan(dag: Dag, plan: Plan, trials: int = 3) -> Verdict:
    """Execute the plan for several seeded instances and compare against the
    reference propagation; failure is a verdict, not an exception."""
    worst, worst_seed = 0.0, 0
    for seed in range(trials):
        inst = instantiate_numeric(dag, seed)
        got = execute_sequence_numeric(dag, inst, plan)
        ref = reference_jacobian(dag, inst)
        err = block_error(got, ref)
        if err > worst:
            worst, worst_seed = err, seed
    return Verdict(
        passed=worst <= REL_TOL,
        worst_error=worst,
        worst_seed=worst_seed,
        trials=trials,
    )
