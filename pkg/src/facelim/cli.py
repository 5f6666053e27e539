"""The ``admission`` command line front end.

A session reads a small key/value config file, loads the target dag, runs
the selected method and prints the elimination sequence with the dense
baseline costs, the optimized cost, and (for branch and bound) search
statistics.  Exit codes: 0 ok, 2 config error, 3 dag error, 4 unknown
method, 5 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .graph import (
    GraphError,
    dense_adjoint_cost,
    dense_tangent_cost,
    parse_graphml,
    validate_dag,
)
from .engine import Plan, PlanReport
from .heuristics import (
    plan_greedy_min_fill,
    plan_sparse_adjoint,
    plan_sparse_tangent,
)
from .bnb import solve_branch_and_bound
from .chaindp import ChainError, chain_as_dag, chain_from_dag, chain_from_text, optimize_chain
from .verify import verify_plan

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DAG = 3
EXIT_METHOD = 4
EXIT_VERIFY = 5

METHODS = (
    "DenseTangent",
    "DenseAdjoint",
    "SparseTangent",
    "SparseAdjoint",
    "GreedyMinFill",
    "BranchAndBound",
    "ChainDP",
)


class ConfigError(Exception):
    pass


class UnknownMethod(Exception):
    pass


@dataclass
class SessionConfig:
    dag_path: Path
    method: str
    time_limit_s: float | None = None
    threads: int = 1
    seed: int = 0
    verify_trials: int = 0


def parse_config(path: str | Path) -> SessionConfig:
    """Whitespace-separated ``key value`` lines; ``#`` starts a comment.
    Unknown keys are rejected.  Relative dag paths resolve against the
    config file's directory."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: expected 'key value'")
        key, value = parts[0], parts[1].strip()
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value
    known = {"dag", "method", "time_limit_s", "threads", "seed", "verify"}
    for key in values:
        if key not in known:
            raise ConfigError(f"{path}: unknown key {key!r}")
    for key in ("dag", "method"):
        if key not in values:
            raise ConfigError(f"{path}: missing key {key!r}")
    method = values["method"]
    if method not in METHODS:
        raise UnknownMethod(
            f"unknown method {method!r}; pick one of {', '.join(METHODS)}"
        )

    def as_int(key: str, default: int) -> int:
        if key not in values:
            return default
        try:
            return int(values[key])
        except ValueError:
            raise ConfigError(f"{path}: key {key!r} must be an integer") from None

    time_limit = None
    if "time_limit_s" in values:
        try:
            time_limit = float(values["time_limit_s"])
        except ValueError:
            raise ConfigError(f"{path}: key 'time_limit_s' must be a number") from None
    dag_path = Path(values["dag"])
    if not dag_path.is_absolute():
        dag_path = path.parent / dag_path
    return SessionConfig(
        dag_path=dag_path,
        method=method,
        time_limit_s=time_limit,
        threads=as_int("threads", 1),
        seed=as_int("seed", 0),
        verify_trials=as_int("verify", 0),
    )


def _load_dag(config: SessionConfig):
    try:
        text = config.dag_path.read_text()
    except OSError as exc:
        raise GraphError(f"cannot read dag {config.dag_path}: {exc}") from None
    if config.method == "ChainDP" and not text.lstrip().startswith("<"):
        spec = chain_from_text(text)
        return chain_as_dag(spec)
    dag = parse_graphml(text)
    validate_dag(dag)
    return dag


def _plan(config: SessionConfig, dag) -> PlanReport:
    dense_t = dense_tangent_cost(dag)
    dense_a = dense_adjoint_cost(dag)
    t0 = time.perf_counter()
    stats = None
    optimal = False
    budget_hit = False
    if config.method == "DenseTangent":
        plan, cost = Plan([]), dense_t
    elif config.method == "DenseAdjoint":
        plan, cost = Plan([]), dense_a
    elif config.method == "SparseTangent":
        plan = plan_sparse_tangent(dag)
        cost = plan.total_cost
    elif config.method == "SparseAdjoint":
        plan = plan_sparse_adjoint(dag)
        cost = plan.total_cost
    elif config.method == "GreedyMinFill":
        plan = plan_greedy_min_fill(dag)
        cost = plan.total_cost
    elif config.method == "BranchAndBound":
        plan, stats = solve_branch_and_bound(
            dag,
            budget=config.time_limit_s,
            workers=config.threads,
            seed=config.seed,
        )
        cost = plan.total_cost
        optimal = stats.proven_optimal
        budget_hit = not stats.proven_optimal
    else:  # ChainDP
        spec = chain_from_dag(dag)
        cost, plan = optimize_chain(spec)
        optimal = True
    elapsed = time.perf_counter() - t0
    return PlanReport(
        method=config.method,
        dense_tangent=dense_t,
        dense_adjoint=dense_a,
        plan=plan,
        optimized_cost=cost,
        optimal=optimal,
        budget_exhausted=budget_hit,
        stats=stats,
        elapsed_s=elapsed,
    )


def render_report(report: PlanReport) -> str:
    lines = [f"elapsed time: {report.elapsed_s:.6g}s", ""]
    lines.append("elimination sequence ")
    lines.append("  (operation mode target cost):")
    for step in report.plan.steps:
        lines.append(f"  {step.render()}")
    lines.append("")
    lines.append(f"dense tangent cost: {report.dense_tangent}")
    lines.append(f"dense adjoint cost: {report.dense_adjoint}")
    lines.append(f"optimized cost: {report.optimized_cost}")
    if report.optimal:
        lines.append("optimal: yes")
    elif report.budget_exhausted:
        lines.append("optimal: no (budget)")
    else:
        lines.append("optimal: no")
    if report.stats is not None:
        lines.append("")
        lines.append("branch and bound statistics:")
        lines.append(
            f"  number of nodes in search space: {report.stats.nodes_generated}"
        )
        lines.append(f"  number of nodes visited: {report.stats.nodes_visited}")
        lines.append(f"  number of nodes pruned: {report.stats.nodes_pruned}")
    if report.verification is not None:
        lines.append("")
        lines.append(f"verification: {report.verification.render()}")
    return "\n".join(lines) + "\n"


def run_session(config_path: str | Path) -> tuple[int, str]:
    try:
        config = parse_config(config_path)
    except ConfigError as exc:
        return EXIT_CONFIG, f"config error: {exc}\n"
    except UnknownMethod as exc:
        return EXIT_METHOD, f"{exc}\n"
    try:
        dag = _load_dag(config)
    except (GraphError, ChainError) as exc:
        return EXIT_DAG, f"dag error: {exc}\n"
    report = _plan(config, dag)
    code = EXIT_OK
    if config.verify_trials > 0 and report.plan.steps is not None:
        if config.method in ("DenseTangent", "DenseAdjoint"):
            pass  # report-only methods emit no executable sequence
        else:
            report.verification = verify_plan(
                dag, report.plan, trials=config.verify_trials
            )
            if not report.verification.passed:
                code = EXIT_VERIFY
    return code, render_report(report)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(
        prog="admission",
        description="plan a minimal-cost Jacobian accumulation for an annotated dag",
    )
    parser.add_argument("config", help="session config file (key value lines)")
    args = parser.parse_args(argv)
    code, text = run_session(args.config)
    sys.stdout.write(text)
    sys.exit(code)
