"""Basis-index <-> bit-vector conversion.

Convention used everywhere in this package: the first registered variable
(qubit 0) occupies the *most significant* bit of the basis index.  A state
labelled |01100010> on 8 qubits therefore has basis index 98, and applying
X to qubit 0 of |0...0> on 8 qubits lands on index 128.
"""

from __future__ import annotations

import numpy as np


def index_to_bits(index: int, n: int) -> np.ndarray:
    """Decode a basis index into an n-vector of bits, qubit 0 first (MSB)."""
    if not 0 <= index < (1 << n):
        raise ValueError(f"basis index {index} out of range for n={n}")
    shifts = np.arange(n - 1, -1, -1)
    return ((index >> shifts) & 1).astype(np.int8)


def bits_to_index(bits) -> int:
    """Encode a bit vector (qubit 0 first) into its basis index."""
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bit value {b!r} is not 0/1")
        index = (index << 1) | int(b)
    return index


def bitstring(index: int, n: int) -> str:
    """Render a basis index as an MSB-first bitstring of length n."""
    if not 0 <= index < (1 << n):
        raise ValueError(f"basis index {index} out of range for n={n}")
    return format(index, f"0{n}b")


def bit_matrix(indices: np.ndarray, n: int) -> np.ndarray:
    """Bit rows for many basis indices at once; column 0 is qubit 0 (MSB)."""
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((indices[:, None] >> shifts[None, :]) & 1).astype(np.int8)
