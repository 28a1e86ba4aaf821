from dataclasses import dataclass

import numpy as np

from ...core.errors import DimensionError
from ..linear.linear_system import as_matrix, as_vector


def as_bits(values, length: int | None = None) -> np.ndarray:
    """Validate a binary assignment and return it as a read-only int8 array."""
    bits = np.array(values, dtype=np.int64, copy=True).ravel()
    if bits.size and not np.all((bits == 0) | (bits == 1)):
        raise DimensionError("binary assignment entries must be 0 or 1")
    if length is not None and bits.shape[0] != length:
        raise DimensionError(f"expected {length} bits, got {bits.shape[0]}")
    bits = bits.astype(np.int8)
    bits.setflags(write=False)
    return bits


@dataclass(frozen=True)
class SearchBox:
    """Iterate state of the square-lattice encoding.

    Decoded points are x0 + l·(x̂ − shift·I); shift=1 is the literal encoding,
    shift=0.5 centres the box on x0.
    """

    x0: np.ndarray
    l: float
    r: int
    shift: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "x0", as_vector(self.x0, "x0"))
        if not (np.isfinite(self.l) and self.l > 0):
            raise DimensionError(f"edge length must be positive, got {self.l}")
        if int(self.r) != self.r or self.r < 1:
            raise DimensionError(f"bits per coordinate must be >= 1, got {self.r}")
        object.__setattr__(self, "l", float(self.l))
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "shift", float(self.shift))

    @property
    def n(self) -> int:
        return self.x0.shape[0]


@dataclass(frozen=True)
class QuboProblem:
    """Symmetric QUBO matrix plus the constant the minimisation may ignore.

    energy(q) + offset == ||a_q·q − b_q||² for every binary q.
    """

    q_matrix: np.ndarray
    offset: float = 0.0
    a_q: np.ndarray | None = None
    b_q: np.ndarray | None = None

    def __post_init__(self):
        q = as_matrix(self.q_matrix, "Q")
        if q.shape[0] != q.shape[1]:
            raise DimensionError(f"Q must be square, got {q.shape}")
        object.__setattr__(self, "q_matrix", q)
        object.__setattr__(self, "offset", float(self.offset))
        if self.a_q is not None:
            object.__setattr__(self, "a_q", as_matrix(self.a_q, "A_q"))
        if self.b_q is not None:
            object.__setattr__(self, "b_q", as_vector(self.b_q, "b_q"))

    @property
    def dimension(self) -> int:
        return self.q_matrix.shape[0]
