"""
Multi-route network description: routes, their noise channels and distortion measures.

Specs are immutable pydantic models, so they can be shared freely between
concurrent trials and round-trip through the run-config file.
"""
import math
from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.config import settings
from app.core.exceptions import AlphabetMismatchError, ConfigurationError
from app.info.distributions import CondPmf
from app.info.primitives import q_ary_symmetric


class DistortionKind(StrEnum):
    REPLACEMENT = "replacement"
    ERASURE = "erasure"
    SQUARED_ERROR = "squared_error"


class ChannelKind(StrEnum):
    BSC = "bsc"
    BEC = "bec"
    AWGN = "awgn"
    GENERAL = "general"


class DistortionMeasure(BaseModel):
    """Per-symbol distortion d(x, x_a) between a sent symbol and the adversary's symbol."""

    model_config = ConfigDict(frozen=True)

    kind: DistortionKind

    @property
    def discrete(self) -> bool:
        return self.kind is not DistortionKind.SQUARED_ERROR

    def adversary_alphabet(self, q: int) -> int:
        """Size of the adversary-output alphabet for a q-ary input alphabet."""
        return q + 1 if self.kind is DistortionKind.ERASURE else q

    def matrix(self, q: int, q_out: int | None = None) -> np.ndarray:
        """Distortion table d[x, x_a]; the erasure sentinel is the last column for erasures."""
        if not self.discrete:
            raise AlphabetMismatchError("squared-error distortion has no finite table")
        q_out = self.adversary_alphabet(q) if q_out is None else q_out
        if self.kind is DistortionKind.REPLACEMENT:
            if q_out != q:
                raise AlphabetMismatchError(f"replacement needs matching alphabets, got {q} and {q_out}")
            return 1.0 - np.eye(q)
        if q_out != q + 1:
            raise AlphabetMismatchError(f"erasure needs an output alphabet of {q + 1} symbols, got {q_out}")
        table = np.full((q, q + 1), math.inf)
        np.fill_diagonal(table[:, :q], 0.0)
        table[:, q] = 1.0
        return table

    def symbol_costs(self, x: np.ndarray, x_a: np.ndarray, q: int | None = None) -> np.ndarray:
        x = np.asarray(x)
        x_a = np.asarray(x_a)
        if self.kind is DistortionKind.SQUARED_ERROR:
            return (x.astype(float) - x_a.astype(float)) ** 2
        changed = x != x_a
        if self.kind is DistortionKind.REPLACEMENT:
            return changed.astype(float)
        if q is None:
            raise AlphabetMismatchError("erasure distortion needs the input alphabet size")
        erased = x_a == q
        costs = np.where(erased, 1.0, 0.0)
        return np.where(changed & ~erased, math.inf, costs)


REPLACEMENT = DistortionMeasure(kind=DistortionKind.REPLACEMENT)
ERASURE = DistortionMeasure(kind=DistortionKind.ERASURE)
SQUARED_ERROR = DistortionMeasure(kind=DistortionKind.SQUARED_ERROR)

_DEFAULT_MEASURE = {
    ChannelKind.BSC: DistortionKind.REPLACEMENT,
    ChannelKind.BEC: DistortionKind.ERASURE,
    ChannelKind.AWGN: DistortionKind.SQUARED_ERROR,
}


class RouteSpec(BaseModel):
    """One route: the adversary-to-receiver channel plus the adversary's distortion limit."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: ChannelKind
    noise: float = Field(default=0.0, alias="N", ge=0.0)
    distortion_limit: float = Field(default=0.0, alias="D", ge=0.0)
    power: float | None = Field(default=None, alias="P")
    q: int = Field(default=2, ge=2)
    distortion: DistortionKind | None = None
    channel: CondPmf | None = None

    @field_validator("channel", mode="before")
    @classmethod
    def _matrix_rows(cls, value):
        if isinstance(value, (list, tuple)):
            return {"rows": value}
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "RouteSpec":
        if self.kind in (ChannelKind.BSC, ChannelKind.BEC) and self.noise > 1.0:
            raise ValueError(f"{self.kind} noise must lie in [0, 1], got {self.noise}")
        if self.kind is ChannelKind.AWGN:
            if self.noise <= 0.0:
                raise ValueError("AWGN noise variance must be positive")
            if self.power is None or self.power <= 0.0:
                raise ValueError("AWGN routes need a positive power constraint P")
        if self.kind is ChannelKind.GENERAL:
            if self.channel is None or self.distortion is None:
                raise ValueError("general routes need both a channel matrix and a distortion kind")
            expected = self.measure.adversary_alphabet(self.q)
            if self.channel.n_inputs != expected:
                raise ValueError(f"general channel must have {expected} input rows for q={self.q}, got {self.channel.n_inputs}")
        elif self.distortion is not None and self.distortion != _DEFAULT_MEASURE[self.kind]:
            raise ValueError(f"{self.kind} routes use {_DEFAULT_MEASURE[self.kind]} distortion")
        return self

    @property
    def measure(self) -> DistortionMeasure:
        kind = self.distortion or _DEFAULT_MEASURE[self.kind]
        return DistortionMeasure(kind=kind)

    @property
    def discrete(self) -> bool:
        return self.kind is not ChannelKind.AWGN

    @property
    def erasure_symbol(self) -> int:
        return self.q

    @property
    def adversary_alphabet(self) -> int:
        return self.measure.adversary_alphabet(self.q)

    def transition_matrix(self) -> np.ndarray:
        """Stochastic matrix of the adversary-to-receiver channel, rows indexed by x_a."""
        if self.kind is ChannelKind.BSC:
            return q_ary_symmetric(self.q, self.noise)
        if self.kind is ChannelKind.BEC:
            size = self.q + 1
            matrix = np.zeros((size, size))
            matrix[: self.q, : self.q] = np.eye(self.q) * (1.0 - self.noise)
            matrix[: self.q, self.q] = self.noise
            matrix[self.q, self.q] = 1.0
            return matrix
        if self.kind is ChannelKind.GENERAL:
            return self.channel.array
        raise AlphabetMismatchError("AWGN routes have no finite transition matrix")

    def transition(self) -> CondPmf:
        return CondPmf.from_array(self.transition_matrix())


class PlacementVector(BaseModel):
    """Indicator of the attacked routes, fixed for a whole block."""

    model_config = ConfigDict(frozen=True)

    bits: tuple[int, ...]

    @model_validator(mode="after")
    def _binary(self) -> "PlacementVector":
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"placement bits must be 0/1, got {self.bits}")
        return self

    @classmethod
    def parse(cls, label: str) -> "PlacementVector":
        return cls(bits=tuple(label.strip()))

    @property
    def weight(self) -> int:
        return sum(self.bits)

    @property
    def label(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, index: int) -> int:
        return self.bits[index]


class NetworkSpec(BaseModel):
    """n_r disjoint routes of which at most n_a are attacked."""

    model_config = ConfigDict(frozen=True)

    n_r: int = Field(ge=1)
    n_a: int = Field(ge=0)
    routes: tuple[RouteSpec, ...]

    @model_validator(mode="after")
    def _consistent(self) -> "NetworkSpec":
        if self.n_a > self.n_r:
            raise ValueError(f"n_a ({self.n_a}) cannot exceed n_r ({self.n_r})")
        if len(self.routes) != self.n_r:
            raise ValueError(f"expected {self.n_r} routes, got {len(self.routes)}")
        if self.n_r > settings.max_routes:
            raise ValueError(f"at most {settings.max_routes} routes are supported")
        return self

    @classmethod
    def identical(cls, n_r: int, n_a: int, route: RouteSpec) -> "NetworkSpec":
        return cls(n_r=n_r, n_a=n_a, routes=(route,) * n_r)

    def kinds(self) -> set[ChannelKind]:
        return {r.kind for r in self.routes}

    def all_of(self, kind: ChannelKind) -> bool:
        return self.kinds() == {kind}

    def check_placement(self, placement: PlacementVector) -> None:
        if len(placement) != self.n_r or placement.weight > self.n_a:
            raise ValueError(f"placement {placement.label} is not valid for n_r={self.n_r}, n_a={self.n_a}")


def bsc_route(N: float, D: float, q: int = 2) -> RouteSpec:
    return RouteSpec(kind=ChannelKind.BSC, N=N, D=D, q=q)


def bec_route(N: float, D: float, q: int = 2) -> RouteSpec:
    return RouteSpec(kind=ChannelKind.BEC, N=N, D=D, q=q)


def awgn_route(N: float, D: float, P: float) -> RouteSpec:
    return RouteSpec(kind=ChannelKind.AWGN, N=N, D=D, P=P)


def general_route(channel: CondPmf, D: float, distortion: DistortionKind, q: int) -> RouteSpec:
    return RouteSpec(kind=ChannelKind.GENERAL, D=D, q=q, distortion=distortion, channel=channel)


def load_network(data: dict) -> NetworkSpec:
    """Build a network from its config-file mapping (``[network]`` table)."""
    try:
        return NetworkSpec.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid network: {exc}") from exc


def dump_network(spec: NetworkSpec) -> dict:
    """Config-file mapping of a network; ``load_network(dump_network(s)) == s``."""
    data = spec.model_dump(mode="json", by_alias=True, exclude_none=True)
    for route in data["routes"]:
        if "channel" in route:
            route["channel"] = route["channel"]["rows"]
    return data
