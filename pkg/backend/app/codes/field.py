"""
Prime fields F_q for the coding lab.
"""
import functools

import galois
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.exceptions import CodeConstructionError


@functools.cache
def prime_field(q: int) -> type[galois.FieldArray]:
    """galois field class for a prime q; extension fields are not supported."""
    if q < 2 or not galois.is_prime(q):
        raise CodeConstructionError(f"codes are built over prime fields only, got q={q}")
    return galois.GF(q)


class FieldElement(BaseModel):
    """Scalar of F_q with arithmetic mod q."""

    model_config = ConfigDict(frozen=True)

    value: int
    modulus: int

    @model_validator(mode="after")
    def _in_field(self) -> "FieldElement":
        prime_field(self.modulus)
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"{self.value} is not an element of F_{self.modulus}")
        return self

    def _coerce(self, other: "FieldElement | int") -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ValueError(f"cannot mix F_{self.modulus} and F_{other.modulus}")
            return other.value
        return int(other) % self.modulus

    def _make(self, value: int) -> "FieldElement":
        return FieldElement(value=value % self.modulus, modulus=self.modulus)

    def __add__(self, other):
        return self._make(self.value + self._coerce(other))

    def __sub__(self, other):
        return self._make(self.value - self._coerce(other))

    def __mul__(self, other):
        return self._make(self.value * self._coerce(other))

    def __neg__(self):
        return self._make(-self.value)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._make(pow(self.value, -1, self.modulus))

    def __truediv__(self, other):
        divisor = self._make(self._coerce(other))
        return self * divisor.inverse()

    def __int__(self) -> int:
        return self.value
