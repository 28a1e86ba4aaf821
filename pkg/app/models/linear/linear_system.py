from dataclasses import dataclass

import numpy as np

from ...core.errors import DimensionError


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Copy *values* into a read-only float64 2-D array, rejecting NaN/Inf."""
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DimensionError(f"{name} contains non-finite entries")
    array.setflags(write=False)
    return array


def as_vector(values, name: str = "vector") -> np.ndarray:
    """Copy *values* into a read-only float64 1-D array, rejecting NaN/Inf."""
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DimensionError(f"{name} contains non-finite entries")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LinearSystem:
    """The pair (A, b) of a square system A·x = b."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "A")
        b = as_vector(self.b, "b")
        rows, cols = a.shape
        if rows != cols:
            raise DimensionError(f"A must be square, got {rows}x{cols}")
        if rows != b.shape[0]:
            raise DimensionError(f"A has {rows} rows but b has length {b.shape[0]}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def to_dict(self) -> dict:
        return {"n": self.n, "a": self.a.tolist(), "b": self.b.tolist()}
