from dataclasses import dataclass

import numpy as np

from ...core.errors import DimensionError
from ..linear.linear_system import as_matrix, as_vector


@dataclass(frozen=True)
class ConjugateBasis:
    """Rows v_k of unit Euclidean norm with V·H·Vᵀ = diag(c)."""

    v: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        v = as_matrix(self.v, "V")
        c = as_vector(self.c, "C")
        if v.shape[0] != v.shape[1] or v.shape[0] != c.shape[0]:
            raise DimensionError(f"basis shape {v.shape} does not match {c.shape[0]} energies")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.shape[0]


@dataclass(frozen=True)
class BlockBasis:
    """V with V·H·Vᵀ equal to the direct sum of ``blocks``."""

    v: np.ndarray
    composition: tuple[int, ...]
    blocks: tuple[np.ndarray, ...]
    is_identity: bool = False

    def __post_init__(self):
        v = as_matrix(self.v, "V")
        composition = tuple(int(a) for a in self.composition)
        if sum(composition) != v.shape[0]:
            raise DimensionError(f"composition {composition} does not sum to {v.shape[0]}")
        blocks = tuple(as_matrix(block, f"H_{k}") for k, block in enumerate(self.blocks))
        if tuple(block.shape[0] for block in blocks) != composition:
            raise DimensionError("block sizes do not match the composition")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "composition", composition)
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def offsets(self) -> tuple[int, ...]:
        """Start row of every block."""
        starts = [0]
        for size in self.composition[:-1]:
            starts.append(starts[-1] + size)
        return tuple(starts)

    def block_diagonal(self) -> np.ndarray:
        n = self.n
        out = np.zeros((n, n))
        for start, block in zip(self.offsets, self.blocks):
            size = block.shape[0]
            out[start : start + size, start : start + size] = block
        return out
