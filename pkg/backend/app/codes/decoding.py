"""
Minimum-distance and erasure decoding for enumerated linear codes.
"""
import numpy as np
from pydantic import BaseModel

from app.codes.linear import LinearCode, message_index
from app.core.exceptions import AlphabetMismatchError

BATCH_CELLS = 1 << 24


def nearest_codewords(received: np.ndarray, codebook: np.ndarray) -> np.ndarray:
    """Index of the closest codeword (Hamming) for each row of ``received``; ties go to the lowest index."""
    received = np.atleast_2d(received)
    if received.shape[1] != codebook.shape[1]:
        raise AlphabetMismatchError(f"received blocks have length {received.shape[1]}, code length is {codebook.shape[1]}")
    per_row = max(1, BATCH_CELLS // max(1, codebook.size))
    decoded = np.empty(received.shape[0], dtype=np.int64)
    for start in range(0, received.shape[0], per_row):
        chunk = received[start : start + per_row]
        distances = (chunk[:, None, :] != codebook[None, :, :]).sum(axis=2)
        decoded[start : start + per_row] = distances.argmin(axis=1)
    return decoded


def min_distance_decode(received, code: LinearCode) -> int:
    """Message index of the nearest codeword; blocks must not contain erasures."""
    received = np.asarray(received)
    if received.min(initial=0) < 0 or received.max(initial=0) >= code.q:
        raise AlphabetMismatchError(f"received symbols must lie in [0, {code.q}); decode erasures with erasure_decode")
    return int(nearest_codewords(received, code.codebook)[0])


class ErasureDecodeResult(BaseModel):
    """Outcome of solving uG = y on the non-erased positions."""

    index: int | None
    consistent_count: int
    rank: int

    @property
    def unique(self) -> bool:
        return self.index is not None


def erasure_decode(received, code: LinearCode, erasure_symbol: int | None = None) -> ErasureDecodeResult:
    """
    Recover the message from the non-erased positions by row reduction over F_q.

    ``consistent_count`` is the number of messages agreeing with every kept
    symbol: 1 for a unique decode, q^(k - rank) when ambiguous, 0 when the kept
    symbols contradict the code.
    """
    erasure_symbol = code.q if erasure_symbol is None else erasure_symbol
    received = np.asarray(received, dtype=np.int64)
    if received.shape != (code.n,):
        raise AlphabetMismatchError(f"received block must have length {code.n}, got shape {received.shape}")
    kept = np.flatnonzero(received != erasure_symbol)
    if kept.size and (received[kept].min() < 0 or received[kept].max() >= code.q):
        raise AlphabetMismatchError(f"kept symbols must lie in [0, {code.q})")
    if kept.size == 0:
        return ErasureDecodeResult(index=None, consistent_count=code.size, rank=0)

    field = code.field
    system = field(np.hstack([code.generator[:, kept].T, received[kept][:, None]]))
    coefficients = system[:, : code.k]
    rank = int(np.linalg.matrix_rank(coefficients))
    if int(np.linalg.matrix_rank(system)) > rank:
        return ErasureDecodeResult(index=None, consistent_count=0, rank=rank)
    if rank < code.k:
        return ErasureDecodeResult(index=None, consistent_count=code.q ** (code.k - rank), rank=rank)
    reduced = system.row_reduce()
    solution = np.asarray(reduced[: code.k, code.k], dtype=np.int64)
    return ErasureDecodeResult(index=message_index(solution, code.q), consistent_count=1, rank=rank)


def consistent_counts(received: np.ndarray, codebook: np.ndarray, erasure_symbol: int) -> np.ndarray:
    """Number of codewords agreeing with each received row on its non-erased positions."""
    received = np.atleast_2d(received)
    kept = received != erasure_symbol
    per_row = max(1, BATCH_CELLS // max(1, codebook.size))
    counts = np.empty(received.shape[0], dtype=np.int64)
    for start in range(0, received.shape[0], per_row):
        chunk = received[start : start + per_row]
        mask = kept[start : start + per_row]
        clash = (chunk[:, None, :] != codebook[None, :, :]) & mask[:, None, :]
        counts[start : start + per_row] = (~clash.any(axis=2)).sum(axis=1)
    return counts
