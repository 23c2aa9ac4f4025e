"""Feature subsets encoded as integer bit masks.

Bit ``j`` (0-based) is set when feature ``j + 1`` belongs to the subset.
Public helpers speak 1-based feature indices, matching the JSON formats.
Python integers are unbounded, so the same encoding covers ``d > 64``;
:func:`encode_rows` switches to a packed-byte path for wide inputs.
"""

from typing import Iterable, List

import numpy as np

from .errors import InvalidInputError


def subset(*indices: int) -> int:
    """Build a subset mask from 1-based feature indices.

    >>> subset(1, 3)
    5
    """
    return from_indices(indices)


def from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        i = int(i)
        if i < 1:
            raise InvalidInputError(f"feature indices are 1-based, got {i}")
        mask |= 1 << (i - 1)
    if mask == 0:
        raise InvalidInputError("feature subsets must be nonempty")
    return mask


def members(mask: int) -> List[int]:
    """Sorted 1-based feature indices of ``mask``."""
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j + 1)
        mask >>= 1
        j += 1
    return out


def size(mask: int) -> int:
    return bin(mask).count("1")


def full(d: int) -> int:
    """The subset {1, ..., d}."""
    return (1 << d) - 1


def check(mask: int, d: int) -> int:
    """Validate that ``mask`` is a nonempty subset of {1..d}."""
    mask = int(mask)
    if mask <= 0:
        raise InvalidInputError("feature subsets must be nonempty")
    if mask >> d:
        raise InvalidInputError(f"subset {members(mask)} has features beyond d={d}")
    return mask


def to_bool(mask: int, d: int) -> np.ndarray:
    """Boolean membership vector of length ``d``."""
    return np.array([(mask >> j) & 1 for j in range(d)], dtype=bool)


def format_subset(mask: int) -> str:
    """'1|3|4' style rendering used by the score CSV."""
    return "|".join(str(i) for i in members(mask))


def encode_rows(bits: np.ndarray) -> List[int]:
    """Encode each row of a boolean matrix as a subset mask.

    Uses one ``uint64`` word per row when ``d <= 64`` and little-endian
    packed bytes otherwise.
    """
    bits = np.asarray(bits, dtype=bool)
    if bits.ndim != 2:
        raise InvalidInputError("expected a 2-d boolean matrix")
    m, d = bits.shape
    if m == 0:
        return []
    if d <= 64:
        weights = np.left_shift(np.uint64(1), np.arange(d, dtype=np.uint64))
        codes = (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
        return [int(c) for c in codes]
    packed = np.packbits(bits, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def count_rows(bits: np.ndarray) -> dict:
    """Map subset mask -> number of rows of ``bits`` encoding it."""
    bits = np.asarray(bits, dtype=bool)
    if bits.shape[0] == 0:
        return {}
    d = bits.shape[1]
    if d <= 64:
        weights = np.left_shift(np.uint64(1), np.arange(d, dtype=np.uint64))
        codes = (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
        uniq, counts = np.unique(codes, return_counts=True)
        return {int(u): int(c) for u, c in zip(uniq, counts)}
    packed = np.packbits(bits, axis=1, bitorder="little")
    uniq, counts = np.unique(packed, axis=0, return_counts=True)
    return {int.from_bytes(u.tobytes(), "little"): int(c) for u, c in zip(uniq, counts)}
