#!/usr/bin/env python3
"""Regenerate the GraphML fixtures and sample session configs in graphs/."""

from pathlib import Path

from facelim.corpus import bat, lion, newton, with_all_jacobians
from facelim.graph import serialize_graphml

ROOT = Path(__file__).resolve().parent.parent / "graphs"

DAGS = {
    "lion.xml": lion(),
    "bat.xml": bat(),
    "lion_classical.xml": with_all_jacobians(lion()),
    "bat_classical.xml": with_all_jacobians(bat()),
    "newton1.xml": newton(1),
    "newton2.xml": newton(2),
    "newton10.xml": newton(10),
}

CONFIGS = {
    "lion_bnb.conf": "dag lion.xml\nmethod BranchAndBound\n",
    "lion_bnb_verified.conf": "dag lion.xml\nmethod BranchAndBound\nverify 3\n",
    "bat_sparse_tangent.conf": "dag bat.xml\nmethod SparseTangent\n",
    "newton1_bnb.conf": "dag newton1.xml\nmethod BranchAndBound\ntime_limit_s 60\n",
    "newton2_bnb_10min.conf": (
        "# anytime run: returns the incumbent when the budget expires\n"
        "dag newton2.xml\nmethod BranchAndBound\ntime_limit_s 600\nthreads 2\n"
    ),
}


def main() -> None:
    ROOT.mkdir(exist_ok=True)
    for name, dag in DAGS.items():
        (ROOT / name).write_text(serialize_graphml(dag))
        print("wrote", ROOT / name)
    for name, text in CONFIGS.items():
        (ROOT / name).write_text(text)
        print("wrote", ROOT / name)


if __name__ == "__main__":
    main()
