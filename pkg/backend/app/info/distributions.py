"""
Finite probability vectors and stochastic matrices.

The models are immutable and validated on construction; numerical code works on
the numpy views returned by ``.array``.
"""
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

PROB_TOL = 1e-12


def _check_probabilities(values: np.ndarray, what: str) -> None:
    if values.size == 0:
        raise ValueError(f"{what} must have at least one entry")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} contains non-finite entries")
    if np.any(values < -PROB_TOL) or np.any(values > 1 + PROB_TOL):
        raise ValueError(f"{what} entries must lie in [0, 1]")


class Pmf(BaseModel):
    """Probability mass function over a finite alphabet."""

    model_config = ConfigDict(frozen=True, ignored_types=(cached_property,))

    probs: tuple[float, ...]

    @field_validator("probs")
    @classmethod
    def _valid(cls, probs: tuple[float, ...]) -> tuple[float, ...]:
        arr = np.asarray(probs, dtype=float)
        _check_probabilities(arr, "Pmf")
        if abs(arr.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"Pmf must sum to 1 (got {arr.sum():.15g})")
        return tuple(float(p) for p in np.clip(arr, 0.0, 1.0))

    @classmethod
    def from_array(cls, values) -> "Pmf":
        return cls(probs=tuple(np.asarray(values, dtype=float).ravel()))

    @classmethod
    def uniform(cls, size: int) -> "Pmf":
        return cls.from_array(np.full(size, 1.0 / size))

    @classmethod
    def bernoulli(cls, p: float) -> "Pmf":
        return cls.from_array([1.0 - p, p])

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    @property
    def size(self) -> int:
        return len(self.probs)


class CondPmf(BaseModel):
    """Stochastic matrix: one output distribution per input symbol."""

    model_config = ConfigDict(frozen=True, ignored_types=(cached_property,))

    rows: tuple[tuple[float, ...], ...]

    @field_validator("rows")
    @classmethod
    def _valid(cls, rows: tuple[tuple[float, ...], ...]) -> tuple[tuple[float, ...], ...]:
        if not rows:
            raise ValueError("CondPmf needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("CondPmf rows must all have the same length")
        arr = np.asarray(rows, dtype=float)
        _check_probabilities(arr, "CondPmf")
        sums = arr.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > PROB_TOL)
        if bad.size:
            raise ValueError(f"CondPmf row {int(bad[0])} sums to {sums[bad[0]]:.15g}, not 1")
        arr = np.clip(arr, 0.0, 1.0)
        return tuple(tuple(float(v) for v in row) for row in arr)

    @classmethod
    def from_array(cls, matrix) -> "CondPmf":
        arr = np.atleast_2d(np.asarray(matrix, dtype=float))
        return cls(rows=tuple(tuple(row) for row in arr))

    @classmethod
    def identity(cls, size: int) -> "CondPmf":
        return cls.from_array(np.eye(size))

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.rows, dtype=float)

    @property
    def n_inputs(self) -> int:
        return len(self.rows)

    @property
    def n_outputs(self) -> int:
        return len(self.rows[0])

    def row(self, symbol: int) -> Pmf:
        return Pmf(probs=self.rows[symbol])

    def compose(self, other: "CondPmf") -> "CondPmf":
        """Cascade self (A→B) with other (B→C) into A→C."""
        if self.n_outputs != other.n_inputs:
            raise ValueError(f"cannot cascade {self.n_inputs}x{self.n_outputs} with {other.n_inputs}x{other.n_outputs}")
        return CondPmf.from_array(_renormalise_rows(self.array @ other.array))

    def joint(self, input_pmf: Pmf) -> "JointPmf":
        if input_pmf.size != self.n_inputs:
            raise ValueError(f"input Pmf has {input_pmf.size} symbols, channel expects {self.n_inputs}")
        return JointPmf.from_array(input_pmf.array[:, None] * self.array)


class JointPmf(BaseModel):
    """Joint distribution over a pair of finite alphabets."""

    model_config = ConfigDict(frozen=True, ignored_types=(cached_property,))

    table: tuple[tuple[float, ...], ...]

    @model_validator(mode="after")
    def _valid(self) -> "JointPmf":
        if not self.table or any(len(r) != len(self.table[0]) for r in self.table):
            raise ValueError("JointPmf table must be a non-empty rectangular matrix")
        arr = np.asarray(self.table, dtype=float)
        _check_probabilities(arr, "JointPmf")
        if abs(arr.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"JointPmf must sum to 1 (got {arr.sum():.15g})")
        return self

    @classmethod
    def from_array(cls, matrix) -> "JointPmf":
        arr = np.atleast_2d(np.asarray(matrix, dtype=float))
        return cls(table=tuple(tuple(float(v) for v in row) for row in arr))

    @cached_property
    def array(self) -> np.ndarray:
        return np.clip(np.asarray(self.table, dtype=float), 0.0, 1.0)

    def marginal_x(self) -> Pmf:
        return Pmf.from_array(_renormalise(self.array.sum(axis=1)))

    def marginal_y(self) -> Pmf:
        return Pmf.from_array(_renormalise(self.array.sum(axis=0)))


def _renormalise(vec: np.ndarray) -> np.ndarray:
    vec = np.clip(vec, 0.0, None)
    return vec / vec.sum()


def _renormalise_rows(matrix: np.ndarray) -> np.ndarray:
    matrix = np.clip(matrix, 0.0, None)
    return matrix / matrix.sum(axis=1, keepdims=True)
