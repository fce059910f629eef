"""Sylvester Hadamard matrices and the two-shot DMD mask sequence."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

# 2**26 entries ~ 64 MiB of int8; covers 64x64 images (order 4096).
MAX_ORDER_EXPONENT = 13

_H2 = np.array([[1, 1], [1, -1]], dtype=np.int64)


class Polarity(str, Enum):
    POSITIVE = "positive"
    INVERSE = "inverse"


@dataclass(frozen=True, eq=False)
class PatternMask:
    """One binary DMD frame.

    ``cells`` holds 0/1 values on a ``side x side`` grid. Shots come in
    pairs: the positive frame shows +1 entries of a Hadamard row as lit
    mirrors, the inverse frame is its complement.
    """

    cells: np.ndarray
    shot_index: int
    polarity: Polarity
    row: int

    @property
    def side(self) -> int:
        return self.cells.shape[0]


def hadamard_matrix(exponent: int) -> np.ndarray:
    """Return the Sylvester Hadamard matrix of order ``2**exponent``.

    Built by repeated Kronecker products ``H_{2k} = H_k (x) H_2`` starting
    from ``[[1]]``. Entries are int64 so ``H @ H.T`` is exact.
    """
    exponent = int(exponent)
    if exponent < 0:
        raise ValueError(f"exponent must be non-negative, got {exponent}")
    if exponent > MAX_ORDER_EXPONENT:
        raise ValueError(
            f"exponent {exponent} exceeds size cap {MAX_ORDER_EXPONENT} "
            f"(order {2 ** MAX_ORDER_EXPONENT})"
        )
    h = np.ones((1, 1), dtype=np.int64)
    for _ in range(exponent):
        h = np.kron(h, _H2)
    return h


def _check_resolution(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"resolution exponent must be >= 1, got {n}")
    if 2 * n > MAX_ORDER_EXPONENT:
        raise ValueError(f"resolution exponent {n} exceeds size cap")
    return n


def mask_stack(resolution_exponent: int) -> np.ndarray:
    """All ``2**(2n+1)`` masks as a ``(shots, side, side)`` uint8 array.

    Shot ``2r`` is the positive mask of Hadamard row ``r``; shot ``2r+1``
    is its inverse. Rows are reshaped row-major.
    """
    n = _check_resolution(resolution_exponent)
    side = 2**n
    h = hadamard_matrix(2 * n)
    positive = (h > 0).astype(np.uint8)
    stack = np.empty((2 * h.shape[0], h.shape[1]), dtype=np.uint8)
    stack[0::2] = positive
    stack[1::2] = 1 - positive
    return stack.reshape(-1, side, side)


def pattern_sequence(resolution_exponent: int) -> list[PatternMask]:
    """Ordered positive/inverse mask pairs for a ``2**n x 2**n`` image."""
    stack = mask_stack(resolution_exponent)
    out = []
    for k, cells in enumerate(stack):
        cells.setflags(write=False)
        polarity = Polarity.POSITIVE if k % 2 == 0 else Polarity.INVERSE
        out.append(PatternMask(cells=cells, shot_index=k, polarity=polarity, row=k // 2))
    return out


def differential_intensity(pos_value: float, inv_value: float) -> float:
    """Signed Hadamard coefficient from a positive/inverse shot pair."""
    if pos_value < 0 or inv_value < 0:
        raise ValueError("counts must be non-negative")
    return pos_value - inv_value
