"""
Plain-text generator matrices: one row per line, integers separated by spaces,
preceded by a ``# q=<q> k=<k> n=<n>`` header.
"""
from pathlib import Path

import numpy as np

from app.codes.linear import LinearCode
from app.core.exceptions import ConfigurationError


def format_generator(code: LinearCode) -> str:
    lines = [f"# q={code.q} k={code.k} n={code.n}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in code.generator)
    return "\n".join(lines) + "\n"


def save_generator(path: str | Path, code: LinearCode) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_generator(code), encoding="utf-8")
    return path


def _header_fields(text: str) -> dict[str, int]:
    fields = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            continue
        for token in line.lstrip("#").split():
            key, _, value = token.partition("=")
            if value.isdigit():
                fields[key] = int(value)
    return fields


def load_generator(path: str | Path, q: int | None = None) -> LinearCode:
    """Read a generator written by save_generator; ``q`` overrides or replaces the header."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"generator file not found: {path}")
    text = path.read_text(encoding="utf-8")
    header = _header_fields(text)
    q = q or header.get("q")
    if q is None:
        raise ConfigurationError(f"{path}: no alphabet size in the header and none given")
    try:
        matrix = np.loadtxt(path, dtype=np.int64, comments="#", ndmin=2)
    except ValueError as e:
        raise ConfigurationError(f"{path}: generator rows must be integers of equal length ({e})") from e
    if "k" in header and matrix.shape[0] != header["k"]:
        raise ConfigurationError(f"{path}: header says k={header['k']} but the file has {matrix.shape[0]} rows")
    return LinearCode(matrix, q)
