"""
The five user workflows. Each takes a validated RunConfig, writes its artifacts
below ``config.out_dir`` and returns a short summary for the interface layer.
"""
import json

import numpy as np
import structlog
from pydantic import BaseModel, Field, ValidationError

from app.adversary.factory import build_strategies
from app.channel.model import NetworkSpec, PlacementVector, dump_network, load_network
from app.codes.io import format_generator, load_generator
from app.codes.linear import LinearCode, SampledCode, gv_code_for_rate, varshamov_sample
from app.core.exceptions import ConfigurationError, DistortionAuditError, InfeasibleSpecError, SpecMismatchError
from app.info.primitives import gilbert_varshamov_distance, gv_rate
from app.rates.closed_forms import AttackTable, binary_attack_table
from app.rates.registry import RateRegistry, build_registry
from app.rates.report import CSV_COLUMNS
from app.services.artifacts import ArtifactWriter
from app.services.run_config import CodeSpec, RunConfig, Workflow, dump_run_config
from app.services.runner import SimulationRunner, TrialStats
from app.sim.config import TrialConfig

logger = structlog.get_logger(__name__)

TABLE_COLUMNS = ("attack", "capacity", "lower", "upper")
SIMULATION_COLUMNS = (
    "placement",
    "trials",
    "block_errors",
    "error_rate",
    "ci_low",
    "ci_high",
    "max_distortion",
    "audit_violations",
)
ROUTE_COLUMNS = (
    "placement",
    "route",
    "attacked",
    "errors",
    "ambiguous",
    "mean_distortion",
    "max_distortion",
    "budget",
    "mutual_information",
)
SWEEP_COLUMNS = ("parameter", "value", "formula", "rate", "status", "family", "capacity", "lower", "upper", "ordered")
CODEGEN_COLUMNS = ("route", "q", "n", "k", "d_target", "d", "attempts", "rate", "gv_rate", "gv_margin")

FAMILIES = {
    "replacement": ("cap_memoryless_replacement", "low_foreseer_replacement", "up_foreseer_replacement"),
    "erasure": ("cap_memoryless_erasure", "low_foreseer_erasure", "up_foreseer_erasure"),
}
ORDER_TOL = 1e-12


class WorkflowResult(BaseModel):
    workflow: Workflow
    files: list[str] = Field(default_factory=list)
    summary: list[str] = Field(default_factory=list)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.12g}"


def _result(workflow: Workflow, writer: ArtifactWriter, summary: list[str]) -> WorkflowResult:
    return WorkflowResult(workflow=workflow, files=[str(p) for p in writer.written], summary=summary)


# ---------- rates ----------
def cmd_rates(config: RunConfig, registry: RateRegistry | None = None) -> WorkflowResult:
    """Evaluate every applicable formula (or the configured ones) in each requested CSI mode."""
    registry = registry or build_registry(solver=config.solver.enabled, resolution=config.solver.resolution)
    spec = config.network
    applicable = registry.applicable(spec)
    names = config.solver.formulas or applicable
    if not names:
        raise SpecMismatchError("No rate formula covers this network.", applicable)

    reports = []
    for name in names:
        for csi in config.solver.csi:
            report = registry.evaluate(name, spec, csi)
            for warning in report.warnings:
                logger.warning("rate_warning", evaluator=name, warning=warning)
            reports.append(report)

    writer = ArtifactWriter(config.out_dir)
    writer.json(
        "rates.json",
        {
            "network": dump_network(spec),
            "applicable": applicable,
            "reports": [r.model_dump(mode="json") for r in reports],
        },
    )
    writer.csv("rates.csv", [row for r in reports for row in r.csv_rows()], CSV_COLUMNS)
    summary = [f"{r.evaluator} [csi={r.csi.value}] = {r.overall:.6f} (worst placement {r.argmin}): {r.description}" for r in reports]
    return _result(Workflow.RATES, writer, summary)


# ---------- table ----------
def format_attack_table(table: AttackTable) -> str:
    header = f"{'attack':<12} {'memoryless capacity':>20} {'foreseer lower':>15} {'foreseer upper':>15}"
    lines = [f"Binary attacks on one route, N={table.N:g}, D={table.D:g}", header]
    for row in table.rows():
        lines.append(f"{row['attack']:<12} {row['capacity']:>20.6f} {row['lower']:>15.6f} {row['upper']:>15.6f}")
    return "\n".join(lines) + "\n"


def write_attack_table(N: float, D: float, out_dir: str) -> tuple[AttackTable, ArtifactWriter]:
    table = binary_attack_table(N, D)
    writer = ArtifactWriter(out_dir)
    writer.csv("table.csv", [{k: v if k == "attack" else _fmt(v) for k, v in row.items()} for row in table.rows()], TABLE_COLUMNS)
    writer.json("table.json", table.model_dump())
    writer.text("table.txt", format_attack_table(table))
    return table, writer


def cmd_table(config: RunConfig) -> WorkflowResult:
    table, writer = write_attack_table(config.table.N, config.table.D, config.out_dir)
    return _result(Workflow.TABLE, writer, format_attack_table(table).splitlines())


# ---------- simulate ----------
def _code_rng(entry: CodeSpec, seed: int | None) -> np.random.Generator:
    base = entry.seed if entry.seed is not None else seed
    if base is None:
        raise ConfigurationError(f"code for route {entry.route} needs a seed")
    return np.random.default_rng([base, entry.route])


def _sample_code(entry: CodeSpec, n: int | None, seed: int | None) -> SampledCode:
    """Load the entry's generator file or draw a Varshamov code for it."""
    if entry.generator is not None:
        code = load_generator(entry.generator, entry.q)
        return SampledCode(code, 0)
    n = entry.n or n
    if n is None:
        raise ConfigurationError(f"code for route {entry.route} needs a block length (codes.n or simulation.n)")
    rng = _code_rng(entry, seed)
    if entry.k is None:
        return gv_code_for_rate(entry.rate, n, entry.q, rng)
    d_target = entry.d_target or min(gilbert_varshamov_distance(entry.k, n, entry.q), int((1 - 1 / entry.q) * n)) or 1
    return varshamov_sample(entry.k, n, entry.q, d_target, rng)


def build_codes(config: RunConfig) -> list[LinearCode | None]:
    by_route = {}
    for entry in config.codes:
        if entry.route in by_route:
            raise ConfigurationError(f"route {entry.route} has more than one code")
        by_route[entry.route] = entry
    codes = []
    for j, route in enumerate(config.network.routes):
        entry = by_route.get(j)
        if not route.discrete:
            if entry is not None:
                raise ConfigurationError(f"route {j} is Gaussian and takes no code")
            codes.append(None)
            continue
        if entry is None:
            raise ConfigurationError(f"discrete route {j} needs a [[codes]] entry")
        if entry.q != route.q:
            raise ConfigurationError(f"code for route {j} has q={entry.q}, route alphabet is {route.q}")
        codes.append(_sample_code(entry, config.simulation.n, config.seed).code)
    return codes


def build_trial_config(config: RunConfig) -> TrialConfig:
    codes = build_codes(config)
    lengths = {c.n for c in codes if c is not None}
    if len(lengths) > 1:
        raise ConfigurationError(f"all route codes need the same block length, got {sorted(lengths)}")
    n = lengths.pop() if lengths else config.simulation.n
    if n is None:
        raise ConfigurationError("simulation.n is required when no route carries a code")
    placements = None
    try:
        if config.simulation.placements != "all":
            placements = tuple(PlacementVector.parse(label) for label in config.simulation.placements)
        return TrialConfig(
            network=config.network,
            codes=tuple(codes),
            strategies=tuple(build_strategies(config.strategies, config.network.routes)),
            placements=placements,
            n=n,
            trials=config.simulation.trials,
            seed=config.seed,
            keep_traces=config.simulation.trace,
        )
    except ValidationError as exc:
        raise ConfigurationError(f"invalid simulation setup: {exc}") from exc


def _simulation_rows(stats: TrialStats) -> tuple[list[dict], list[dict]]:
    rows, route_rows = [], []
    for p in stats.placements:
        rows.append(
            {
                "placement": p.placement,
                "trials": p.trials,
                "block_errors": p.block_errors,
                "error_rate": _fmt(p.error_rate),
                "ci_low": _fmt(p.ci_low),
                "ci_high": _fmt(p.ci_high),
                "max_distortion": _fmt(max(r.max_distortion for r in p.routes)),
                "audit_violations": p.audit_violations,
            }
        )
        for r in p.routes:
            route_rows.append(
                {
                    "placement": p.placement,
                    "route": r.route,
                    "attacked": int(r.attacked),
                    "errors": r.errors,
                    "ambiguous": r.ambiguous,
                    "mean_distortion": _fmt(r.mean_distortion),
                    "max_distortion": _fmt(r.max_distortion),
                    "budget": _fmt(r.budget),
                    "mutual_information": _fmt(r.mutual_information),
                }
            )
    return rows, route_rows


def cmd_simulate(config: RunConfig, runner: SimulationRunner | None = None, progress: bool = True) -> WorkflowResult:
    """Monte Carlo over the configured placements; raises DistortionAuditError after writing if the audit failed."""
    trial_config = build_trial_config(config)
    runner = runner or SimulationRunner(workers=config.simulation.workers, progress=progress)
    stats = runner.run(trial_config)

    writer = ArtifactWriter(config.out_dir)
    rows, route_rows = _simulation_rows(stats)
    writer.json(
        "simulation.json",
        {
            "config": json.loads(dump_run_config(config)),
            "codes": [None if c is None else format_generator(c) for c in trial_config.codes],
            "stats": stats.model_dump(mode="json", exclude={"traces"}),
        },
    )
    writer.csv("simulation.csv", rows, SIMULATION_COLUMNS)
    writer.csv("simulation_routes.csv", route_rows, ROUTE_COLUMNS)
    if config.simulation.trace:
        writer.jsonl("traces.jsonl", stats.traces)

    summary = [
        f"placement {p.placement}: error rate {p.error_rate:.4f} [{p.ci_low:.4f}, {p.ci_high:.4f}] over {p.trials} trials"
        for p in stats.placements
    ]
    summary.append(f"worst placement {stats.worst_placement}: {stats.worst_error_rate:.4f}")
    if not stats.audit_passed:
        raise DistortionAuditError(
            f"{stats.audit_violations} blocks exceeded their route budget; artifacts in {config.out_dir}"
        )
    return _result(Workflow.SIMULATE, writer, summary)


# ---------- sweep ----------
def network_at(spec: NetworkSpec, parameter: str, value: float) -> NetworkSpec:
    """Copy of ``spec`` with ``parameter`` set on every route (or n_a set for the network)."""
    data = dump_network(spec)
    if parameter == "n_a":
        data["n_a"] = int(round(value))
    else:
        for route in data["routes"]:
            route[parameter] = float(value)
    return load_network(data)


def _ordering(values: dict[str, float | None]) -> dict[str, dict]:
    columns = {}
    for family, (cap, low, up) in FAMILIES.items():
        triple = (values.get(cap), values.get(low), values.get(up))
        if any(v is None for v in triple):
            continue
        c, lo, hi = triple
        entry = {
            "family": family,
            "capacity": _fmt(c),
            "lower": _fmt(lo),
            "upper": _fmt(hi),
            "ordered": int(lo <= hi + ORDER_TOL and hi <= c + ORDER_TOL),
        }
        for name in (cap, low, up):
            columns[name] = entry
    return columns


def cmd_sweep(config: RunConfig, registry: RateRegistry | None = None) -> WorkflowResult:
    """Long-format rate curves along one parameter, with the bound-ordering check per point."""
    registry = registry or build_registry(solver=config.solver.enabled, resolution=config.solver.resolution)
    sweep = config.sweep
    values = np.linspace(sweep.start, sweep.stop, sweep.steps)
    rows = []
    disordered = 0
    for value in values:
        spec = network_at(config.network, sweep.parameter, value)
        names = sweep.formulas or [n for n in registry.applicable(spec) if n != "cap_memoryless_general"]
        if not names:
            raise SpecMismatchError(f"No rate formula covers the network at {sweep.parameter}={value:g}.", [])
        results: dict[str, float | None] = {}
        statuses: dict[str, str] = {}
        for name in names:
            try:
                results[name] = registry.evaluate(name, spec).overall
                statuses[name] = "ok"
            except InfeasibleSpecError as exc:
                results[name] = None
                statuses[name] = "infeasible"
                logger.info("sweep_point_infeasible", formula=name, parameter=sweep.parameter, value=float(value), reason=str(exc))
        ordering = _ordering(results)
        disordered += len({e["family"] for e in ordering.values() if not e["ordered"]})
        for name in names:
            rows.append(
                {
                    "parameter": sweep.parameter,
                    "value": _fmt(float(value)),
                    "formula": name,
                    "rate": _fmt(results[name]),
                    "status": statuses[name],
                    **ordering.get(name, {}),
                }
            )
    if disordered:
        logger.error("bound_ordering_violated", points=disordered)

    writer = ArtifactWriter(config.out_dir)
    writer.csv("sweep.csv", rows, SWEEP_COLUMNS)
    summary = [f"{len(rows)} rows over {sweep.steps} values of {sweep.parameter}", f"ordering violations: {disordered}"]
    return _result(Workflow.SWEEP, writer, summary)


# ---------- codegen ----------
def cmd_codegen(config: RunConfig) -> WorkflowResult:
    """Sample one Varshamov code per [[codes]] entry; write its generator and a GV report."""
    writer = ArtifactWriter(config.out_dir)
    entries = []
    for entry in config.codes:
        sampled = _sample_code(entry, config.simulation.n, config.seed)
        code = sampled.code
        d = code.min_distance
        achievable = gv_rate(d, code.n, code.q)
        report = {
            "route": entry.route,
            "q": code.q,
            "n": code.n,
            "k": code.k,
            "d_target": entry.d_target,
            "d": d,
            "attempts": sampled.attempts,
            "rate": code.rate,
            "gv_rate": achievable,
            "gv_margin": achievable - code.rate,
        }
        entries.append(report)
        writer.text(f"generator_route{entry.route}.txt", format_generator(code))
        logger.info("code_generated", route=entry.route, n=code.n, k=code.k, d=d, attempts=sampled.attempts)
    writer.json("codegen.json", {"codes": entries})
    writer.csv("codegen.csv", [{k: _fmt(v) if isinstance(v, float) else v for k, v in e.items()} for e in entries], CODEGEN_COLUMNS)
    summary = [
        f"route {e['route']}: [{e['n']}, {e['k']}, {e['d']}]_{e['q']} after {e['attempts']} attempts, GV margin {e['gv_margin']:+.4f}"
        for e in entries
    ]
    return _result(Workflow.CODEGEN, writer, summary)


WORKFLOWS = {
    Workflow.RATES: cmd_rates,
    Workflow.TABLE: cmd_table,
    Workflow.SIMULATE: cmd_simulate,
    Workflow.SWEEP: cmd_sweep,
    Workflow.CODEGEN: cmd_codegen,
}


def run_workflow(config: RunConfig, progress: bool = True) -> WorkflowResult:
    logger.info("workflow_started", workflow=config.workflow.value, out_dir=config.out_dir, seed=config.seed)
    if config.workflow is Workflow.SIMULATE:
        return cmd_simulate(config, progress=progress)
    return WORKFLOWS[config.workflow](config)
