"""
Run configuration: one TOML or JSON file per run, overridable from the command line.

Example::

    workflow = "simulate"
    seed = 7
    out_dir = "out"

    [network]
    n_r = 2
    n_a = 1
    routes = [{kind = "bsc", N = 0.05, D = 0.05}, {kind = "bsc", N = 0.05, D = 0.05}]

    [[strategies]]
    route = 0
    kind = "foreseer"

    [[codes]]
    route = 0
    rate = 0.25

    [simulation]
    trials = 1000
    n = 32
"""
import json
import tomllib
from enum import StrEnum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.adversary.factory import StrategyDescriptor
from app.channel.model import NetworkSpec, dump_network
from app.core.exceptions import ConfigurationError
from app.rates.report import CsiMode


class Workflow(StrEnum):
    RATES = "rates"
    TABLE = "table"
    SIMULATE = "simulate"
    SWEEP = "sweep"
    CODEGEN = "codegen"

    @classmethod
    def _missing_(cls, value):
        if value == "table1":
            return cls.TABLE
        return None


STOCHASTIC = {Workflow.SIMULATE, Workflow.CODEGEN}


class CodeSpec(BaseModel):
    """
    Code for one route. Either a generator file, or a Varshamov sample described
    by ``k`` (or ``rate``) and an optional target distance.
    """

    model_config = ConfigDict(frozen=True)

    route: int = Field(default=0, ge=0)
    q: int = Field(default=2, ge=2)
    k: int | None = Field(default=None, ge=1)
    n: int | None = Field(default=None, ge=1)
    rate: float | None = Field(default=None, gt=0.0, le=1.0)
    d_target: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)
    generator: str | None = None

    @model_validator(mode="after")
    def _described(self) -> "CodeSpec":
        if self.generator is None and self.k is None and self.rate is None:
            raise ValueError(f"code for route {self.route} needs a generator file, k or rate")
        if self.generator is not None and not Path(self.generator).is_file():
            raise ValueError(f"generator file {self.generator} does not exist")
        return self


class SweepSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    parameter: Literal["N", "D", "P", "n_a"]
    start: float
    stop: float
    steps: int = Field(ge=2)
    formulas: list[str] | None = None


class SimulationSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    trials: int = Field(default=1000, ge=1)
    n: int | None = Field(default=None, ge=1)
    placements: Literal["all"] | list[str] = "all"
    trace: bool = False
    workers: int | None = Field(default=None, ge=1)


class TableSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: float = Field(default=0.1, ge=0.0, le=0.5)
    D: float = Field(default=0.1, ge=0.0, le=0.5)


class SolverSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    enabled: bool = True
    resolution: int | None = Field(default=None, ge=2)
    csi: list[CsiMode] = Field(default_factory=lambda: [CsiMode.NONE, CsiMode.TX])
    formulas: list[str] | None = None


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    workflow: Workflow
    seed: int | None = Field(default=None, ge=0)
    out_dir: str = "out"
    network: NetworkSpec | None = None
    strategies: list[StrategyDescriptor] = Field(default_factory=list)
    codes: list[CodeSpec] = Field(default_factory=list)
    sweep: SweepSection | None = None
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    table: TableSection = Field(default_factory=TableSection)
    solver: SolverSection = Field(default_factory=SolverSection)

    @field_validator("workflow", mode="before")
    @classmethod
    def _workflow_alias(cls, value):
        return Workflow(value) if isinstance(value, str) and value == "table1" else value

    @field_validator("network", mode="before")
    @classmethod
    def _network_routes(cls, value):
        # a single route table expands to n_r identical routes
        if isinstance(value, dict) and "route" in value and "routes" not in value:
            value = {**value, "routes": [value["route"]] * int(value.get("n_r", 1))}
            value.pop("route")
        return value

    @model_validator(mode="after")
    def _complete(self) -> "RunConfig":
        if self.workflow in STOCHASTIC and self.seed is None:
            raise ValueError(f"workflow '{self.workflow}' is stochastic and needs a seed")
        if self.workflow in (Workflow.RATES, Workflow.SIMULATE, Workflow.SWEEP) and self.network is None:
            raise ValueError(f"workflow '{self.workflow}' needs a [network] section")
        if self.workflow is Workflow.SWEEP and self.sweep is None:
            raise ValueError("workflow 'sweep' needs a [sweep] section")
        if self.workflow is Workflow.CODEGEN and not self.codes:
            raise ValueError("workflow 'codegen' needs at least one [[codes]] entry")
        if self.network is not None:
            for entry in [*self.strategies, *self.codes]:
                if entry.route >= self.network.n_r:
                    raise ValueError(f"route {entry.route} does not exist, network has {self.network.n_r} routes")
        return self


def _parse(text: str, suffix: str) -> dict:
    if suffix == ".toml":
        return tomllib.loads(text)
    if suffix == ".json":
        return json.loads(text)
    raise ConfigurationError(f"unsupported config format '{suffix}', use .toml or .json")


def load_run_config(path: str | Path, **overrides) -> RunConfig:
    """Read, apply flag overrides, validate. Fails before any computation starts."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file {path} does not exist")
    try:
        data = _parse(path.read_text(encoding="utf-8"), path.suffix.lower())
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    return build_run_config(data, **overrides)


def build_run_config(data: dict, **overrides) -> RunConfig:
    data = dict(data)
    simulation = dict(data.get("simulation") or {})
    for key in ("trials", "n"):
        if overrides.get(key) is not None:
            simulation[key] = overrides.pop(key)
    if simulation:
        data["simulation"] = simulation
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid run config: {exc}") from exc


def dump_run_config(config: RunConfig) -> str:
    """JSON text that ``build_run_config(json.loads(...))`` turns back into ``config``."""
    data = config.model_dump(mode="json", by_alias=True, exclude_none=True)
    if config.network is not None:
        data["network"] = dump_network(config.network)
    return json.dumps(data, indent=2, sort_keys=True)
