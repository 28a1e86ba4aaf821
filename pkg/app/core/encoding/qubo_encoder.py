"""Square-lattice QUBO encoding of a linear system.

Bits are stored most-significant first inside a coordinate
(q_i^(0), ..., q_i^(R-1)) and coordinates are contiguous, so the bit of
coordinate i with weight 2^-s sits at index i·R + s.
"""

import numpy as np

from ...models.linear.linear_system import LinearSystem
from ...models.qubo.qubo_problem import QuboProblem, SearchBox, as_bits
from ..errors import DimensionError
from ..linalg.linsys import gram_matrix


def bit_weights(r: int) -> np.ndarray:
    """(2^0, 2^-1, ..., 2^(1-R))."""
    if int(r) != r or r < 1:
        raise DimensionError(f"bits per coordinate must be >= 1, got {r}")
    return np.ldexp(1.0, -np.arange(int(r)))


def bits_to_xhat(q, n: int, r: int) -> np.ndarray:
    bits = as_bits(q, length=n * r)
    return bits.reshape(n, r).astype(np.float64) @ bit_weights(r)


def advance(x0: np.ndarray, l: float, xhat: np.ndarray, shift: float, v: np.ndarray | None = None) -> np.ndarray:
    """x0 + L·Vᵀ(x̂ − shift·I); V=None stands for the canonical basis."""
    step = xhat - shift
    if v is not None:
        step = v.T @ step
    return x0 + l * step


def box_decode(box: SearchBox, q) -> np.ndarray:
    xhat = bits_to_xhat(q, box.n, box.r)
    return advance(box.x0, box.l, xhat, box.shift)


def shifted_rhs(a: np.ndarray, a_v: np.ndarray, b: np.ndarray, x0: np.ndarray, l: float, shift: float) -> np.ndarray:
    """b_q = (b + shift·L·A_V·I − A·x0)/L, with A_V = A·Vᵀ (A itself on the canonical lattice)."""
    return (b + shift * l * a_v.sum(axis=1) - a @ x0) / l


def lattice_qubo(h: np.ndarray, linear: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """kron(H, w·wᵀ) − 2·Diag(kron(linear, w)).

    *linear* is A_Vᵀ·b_q restricted to the coordinates covered by *h*.
    """
    q = np.kron(h, np.outer(weights, weights))
    q[np.diag_indices_from(q)] -= 2.0 * np.kron(linear, weights)
    return q


def encode_square(system: LinearSystem, box: SearchBox) -> QuboProblem:
    if box.n != system.n:
        raise DimensionError(f"box has dimension {box.n}, system has {system.n}")
    weights = bit_weights(box.r)
    b_q = shifted_rhs(system.a, system.a, system.b, box.x0, box.l, box.shift)
    q_matrix = lattice_qubo(gram_matrix(system.a), system.a.T @ b_q, weights)
    return QuboProblem(
        q_matrix=q_matrix,
        offset=float(b_q @ b_q),
        a_q=np.kron(system.a, weights),
        b_q=b_q,
    )


def energy(problem: QuboProblem, q) -> float:
    """qᵀQq with bits read as 0/1 reals."""
    bits = as_bits(q, length=problem.dimension).astype(np.float64)
    return float(bits @ problem.q_matrix @ bits)


__all__ = [
    "advance",
    "bit_weights",
    "bits_to_xhat",
    "box_decode",
    "encode_square",
    "energy",
    "lattice_qubo",
    "shifted_rhs",
]
