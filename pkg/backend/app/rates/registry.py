"""
Named rate evaluators and the registry the rates workflow dispatches through.
Each evaluator states which networks it covers, so mismatches are reported with
the list of evaluators that would apply.
"""
from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import Dict, Optional

from app.channel.model import ChannelKind, NetworkSpec
from app.core.exceptions import SpecMismatchError
from app.rates import closed_forms
from app.rates.minimax import cap_memoryless_general
from app.rates.report import CsiMode, RateReport


class RateEvaluator(ABC):
    """Interface that all rate formulas implement."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Unique identifier for the evaluator."""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """Formula evaluated and the attack model it belongs to."""
        pass

    @abstractmethod
    def applies(self, spec: NetworkSpec) -> bool:
        """True when the formula is defined for every route of the network."""
        pass

    @abstractmethod
    def evaluate(self, spec: NetworkSpec, csi: CsiMode = CsiMode.NONE) -> RateReport:
        pass


def _binary_of(kind: ChannelKind) -> Callable[[NetworkSpec], bool]:
    return lambda spec: spec.all_of(kind) and all(r.q == 2 for r in spec.routes)


class ClosedFormEvaluator(RateEvaluator):
    """
    Wraps a closed-form function. Closed forms hold for both CSI modes, so the
    requested mode is only recorded on the report.
    """

    def __init__(self, name: str, description: str, func: Callable[[NetworkSpec], RateReport], predicate):
        self._name = name
        self._description = description
        self._func = func
        self._predicate = predicate

    @property
    def name(self) -> str:
        return self._name

    @property
    def description(self) -> str:
        return self._description

    def applies(self, spec: NetworkSpec) -> bool:
        return self._predicate(spec)

    def evaluate(self, spec: NetworkSpec, csi: CsiMode = CsiMode.NONE) -> RateReport:
        report = self._func(spec)
        return report.model_copy(update={"csi": CsiMode(csi)})


class MinimaxEvaluator(RateEvaluator):
    """Numerical memoryless capacity for small discrete alphabets."""

    def __init__(self, resolution: int | None = None):
        self._resolution = resolution

    @property
    def name(self) -> str:
        return "cap_memoryless_general"

    @property
    def description(self) -> str:
        return "Memoryless capacity by numerical minimax over input and adversary laws (discrete routes)"

    def applies(self, spec: NetworkSpec) -> bool:
        return all(route.discrete for route in spec.routes)

    def evaluate(self, spec: NetworkSpec, csi: CsiMode = CsiMode.NONE) -> RateReport:
        return cap_memoryless_general(spec, csi=csi, resolution=self._resolution)


class RateRegistry:
    """Container for rate evaluators, injectable into the workflows."""

    def __init__(self):
        self._evaluators: Dict[str, RateEvaluator] = {}

    def register(self, evaluator: RateEvaluator) -> None:
        """Add an evaluator to the registry."""
        self._evaluators[evaluator.name] = evaluator

    def get(self, name: str) -> Optional[RateEvaluator]:
        """Retrieve an evaluator by name."""
        return self._evaluators.get(name)

    def list_all(self) -> Dict[str, RateEvaluator]:
        """Return all registered evaluators."""
        return self._evaluators.copy()

    def applicable(self, spec: NetworkSpec) -> list[str]:
        return [name for name, evaluator in self._evaluators.items() if evaluator.applies(spec)]

    def evaluate(self, name: str, spec: NetworkSpec, csi: CsiMode = CsiMode.NONE) -> RateReport:
        evaluator = self.get(name)
        if evaluator is None:
            raise SpecMismatchError(f"Unknown evaluator '{name}'.", self.applicable(spec))
        if not evaluator.applies(spec):
            raise SpecMismatchError(f"{name} does not cover this network.", self.applicable(spec))
        return evaluator.evaluate(spec, csi)


def build_registry(solver: bool = True, resolution: int | None = None) -> RateRegistry:
    """Registry holding every closed form and, optionally, the numerical solver."""
    bsc = _binary_of(ChannelKind.BSC)
    bec = _binary_of(ChannelKind.BEC)

    def awgn(spec: NetworkSpec) -> bool:
        return spec.all_of(ChannelKind.AWGN)

    registry = RateRegistry()
    entries = [
        ("cap_memoryless_replacement", "Memoryless capacity, binary replacement", closed_forms.cap_memoryless_replacement, bsc),
        ("low_foreseer_replacement", "Foreseer lower bound, binary replacement", closed_forms.low_foreseer_replacement, bsc),
        ("up_foreseer_replacement", "Foreseer upper bound, binary replacement", closed_forms.up_foreseer_replacement, bsc),
        ("cap_memoryless_erasure", "Memoryless capacity, binary erasure", closed_forms.cap_memoryless_erasure, bec),
        ("low_foreseer_erasure", "Foreseer lower bound, binary erasure", closed_forms.low_foreseer_erasure, bec),
        ("up_foreseer_erasure", "Foreseer upper bound, binary erasure", closed_forms.up_foreseer_erasure, bec),
        ("cap_memoryless_gaussian", "Memoryless capacity, Gaussian jamming", closed_forms.cap_memoryless_gaussian, awgn),
        (
            "cap_independent_jammer_gaussian",
            "Rate against an independent Gaussian jammer",
            closed_forms.cap_independent_jammer_gaussian,
            awgn,
        ),
    ]
    for name, description, func, predicate in entries:
        registry.register(ClosedFormEvaluator(name, description, func, predicate))
    if solver:
        registry.register(MinimaxEvaluator(resolution))
    return registry
