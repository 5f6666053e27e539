"""Shared fixtures: benchmark dags, reference plans, random dag corpus."""

import random

import pytest

from facelim.corpus import bat, lion, newton, with_all_jacobians
from facelim.engine import Plan, PlanStep
from facelim.graph import Dag, DagEdge, DagVertex


@pytest.fixture
def lion_dag():
    return lion()


@pytest.fixture
def bat_dag():
    return bat()


@pytest.fixture
def newton1_dag():
    return newton(1)


@pytest.fixture
def lion_classical():
    return with_all_jacobians(lion())


@pytest.fixture
def bat_classical():
    return with_all_jacobians(bat())


def classical_bat_face_plan() -> Plan:
    """The 10-face product-only sequence on the classical bat dag (total 22).

    Same multiplications as the published sequence; two of its fills land in
    the existing blocks of (1,4) and (2,6) here, so the faces that follow
    carry those labels instead.
    """
    return Plan([
        PlanStep("ELI", "MUL", (1, 3, 4), 1),
        PlanStep("ELI", "MUL", (2, 3, 6), 1),
        PlanStep("ELI", "MUL", (-1, 1, 4), 2),
        PlanStep("ELI", "MUL", (-1, 1, 3), 2),
        PlanStep("ELI", "MUL", (-1, 1, 3, 5), 4),
        PlanStep("ELI", "MUL", (-1, 1, 3, 6), 2),
        PlanStep("ELI", "MUL", (0, 2, 6), 2),
        PlanStep("ELI", "MUL", (0, 2, 3), 2),
        PlanStep("ELI", "MUL", (0, 2, 3, 4), 2),
        PlanStep("ELI", "MUL", (0, 2, 3, 5), 4),
    ])


def newton_optimal_plan() -> Plan:
    """The 10-step optimum of the single Newton step (total 74,000): both
    residual partials preaccumulated and pushed through the solve as explicit
    products, the far costlier Jacobian-of-residual partials propagated as
    tangents, and the known identity carry finalized at zero cost."""
    return Plan([
        PlanStep("ACC", "TAN", (0, 2), 2000),
        PlanStep("ACC", "TAN", (2, 3), 8000),
        PlanStep("ELI", "MUL", (0, 2, 3), 1000),
        PlanStep("ACC", "TAN", (-1, 2), 2000),
        PlanStep("ELI", "MUL", (-1, 2, 3), 1000),
        PlanStep("ACC", "TAN", (-1, 1), 20000),
        PlanStep("ELI", "TAN", (-1, 1, 3), 10000),
        PlanStep("ACC", "TAN", (0, 1), 20000),
        PlanStep("ELI", "TAN", (0, 1, 3), 10000),
        PlanStep("ACC", "TAN", (-1, 3), 0),
    ])


def random_dag(
    seed: int,
    max_intermediates: int = 5,
    max_size: int = 4,
    jac_prob: float = 0.2,
    identity_prob: float = 0.1,
) -> Dag:
    """Seeded layered dag with every vertex on an input-to-output path."""
    rng = random.Random(seed)
    n_in = rng.randint(1, 2)
    n_out = rng.randint(1, 2)
    n_mid = rng.randint(1, max_intermediates)
    layers = [list(range(-n_in + 1, 1))]
    mid = list(range(1, n_mid + 1))
    while mid:
        take = rng.randint(1, len(mid))
        layers.append(mid[:take])
        mid = mid[take:]
    layers.append(list(range(n_mid + 1, n_mid + n_out + 1)))

    sizes = {}
    for layer in layers:
        for v in layer:
            sizes[v] = rng.randint(1, max_size)

    edges = {}

    def add_edge(a, b):
        if (a, b) in edges:
            return
        tangent = rng.randint(1, 9)
        adjoint = rng.randint(1, 9)
        kind = "general"
        if sizes[a] == sizes[b] and rng.random() < identity_prob:
            kind = "identity"
            tangent = adjoint = 0
        edges[(a, b)] = DagEdge(
            a, b, tangent, adjoint,
            has_jacobian=rng.random() < jac_prob,
            jacobian_kind=kind,
        )

    earlier = list(layers[0])
    for layer in layers[1:]:
        for v in layer:
            for p in rng.sample(earlier, k=min(len(earlier), rng.randint(1, 2))):
                add_edge(p, v)
        earlier.extend(layer)
    # every non-terminal vertex needs a successor
    later = []
    for layer in reversed(layers[:-1]):
        later = [v for l in layers[layers.index(layer) + 1:] for v in l]
        for v in layer:
            if not any(a == v for a, _ in edges):
                add_edge(v, rng.choice(later))
    vertices = [DagVertex(v, sizes[v]) for layer in layers for v in layer]
    return Dag(vertices, list(edges.values()))
