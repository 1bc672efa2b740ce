"""
Writers for run artifacts. Output is a pure function of its input: keys are
sorted, floats keep full precision and nothing time-dependent is written.
"""
import csv
import io
import json
from pathlib import Path

import structlog

logger = structlog.get_logger(__name__)


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"


def to_csv(rows: list[dict], columns: list[str] | tuple[str, ...]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


class ArtifactWriter:
    """Writes named files below one output directory and remembers what it wrote."""

    def __init__(self, out_dir: str | Path):
        self.out_dir = Path(out_dir)
        self.written: list[Path] = []

    def _write(self, name: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        path.write_text(text, encoding="utf-8")
        self.written.append(path)
        logger.info("artifact_written", path=str(path), bytes=len(text))
        return path

    def json(self, name: str, payload) -> Path:
        return self._write(name, to_json(payload))

    def csv(self, name: str, rows: list[dict], columns) -> Path:
        return self._write(name, to_csv(rows, columns))

    def text(self, name: str, text: str) -> Path:
        return self._write(name, text)

    def jsonl(self, name: str, records: list[dict]) -> Path:
        return self._write(name, "".join(json.dumps(r, sort_keys=True) + "\n" for r in records))
