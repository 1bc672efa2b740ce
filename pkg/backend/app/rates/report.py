"""
Result model shared by every rate evaluator.
"""
import csv
import io
from enum import StrEnum

from pydantic import BaseModel, Field

CSV_COLUMNS = ("evaluator", "csi", "placement", "route", "term", "value", "overall")


class CsiMode(StrEnum):
    NONE = "none"
    TX = "tx"


class PlacementValue(BaseModel):
    """Rate for one adversary placement, split into per-route summands."""

    placement: str
    value: float
    terms: tuple[float, ...]


class RateReport(BaseModel):
    """Per-placement values of a rate formula and its reduction over placements."""

    evaluator: str
    description: str
    csi: CsiMode = CsiMode.NONE
    placements: list[PlacementValue]
    overall: float
    argmin: str
    raw_overall: float | None = None
    alternate_order_value: float | None = None
    input_pmfs: list[list[float]] | None = None
    adversary_laws: list[list[list[float]]] | None = None
    warnings: list[str] = Field(default_factory=list)

    def value_for(self, placement: str) -> float:
        for entry in self.placements:
            if entry.placement == placement:
                return entry.value
        raise KeyError(placement)

    def csv_rows(self) -> list[dict]:
        """Long-format rows: one per (placement, route) summand plus one total per placement."""
        rows = []
        for entry in self.placements:
            for route, term in enumerate(entry.terms):
                rows.append(self._row(entry.placement, str(route), "summand", term))
            rows.append(self._row(entry.placement, "all", "total", entry.value))
        return rows

    def _row(self, placement: str, route: str, term: str, value: float) -> dict:
        return {
            "evaluator": self.evaluator,
            "csi": self.csi.value,
            "placement": placement,
            "route": route,
            "term": term,
            "value": f"{value:.12g}",
            "overall": f"{self.overall:.12g}",
        }

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.csv_rows())
        return buffer.getvalue()


def reduce_placements(
    evaluator: str,
    description: str,
    placements: list[PlacementValue],
    *,
    csi: CsiMode = CsiMode.NONE,
    **extra,
) -> RateReport:
    """Build a report whose overall value is the worst (smallest) placement; ties keep the first."""
    worst = min(placements, key=lambda p: p.value)
    return RateReport(
        evaluator=evaluator,
        description=description,
        csi=csi,
        placements=placements,
        overall=worst.value,
        argmin=worst.placement,
        **extra,
    )
