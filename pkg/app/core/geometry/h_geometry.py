"""Geometry of f(x) = ||A·x − b||² in the metric H = AᵀA.

Rows of a ConjugateBasis are pairwise H-orthogonal, so f is separable in the
rhombus coordinates D of x = x0 + Σ_j D_j·v_j:
f(x) = f(x*) + Σ_j C_j·(D_j − D*_j)².
"""

from dataclasses import dataclass

import numpy as np

from ...models.geometry.basis_model import BlockBasis, ConjugateBasis
from ...models.linear.linear_system import LinearSystem, as_vector
from ...utils.logger import logger
from ..errors import DecompositionError, DimensionError, PreconditionError, SingularGeometryError, SingularMatrixError
from ..linalg.linsys import gram_matrix, pivoted_solve

DEGENERACY_TOLERANCE = 1e-12
MAX_CORNER_DIMENSION = 16


@dataclass
class OperationCounter:
    """Scalar multiply-adds spent by an orthogonalization."""

    multiply_adds: int = 0

    def add(self, count: int) -> None:
        self.multiply_adds += int(count)


def h_inner(h, v, w) -> float:
    h = np.asarray(h, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or v.shape != (h.shape[0],) or w.shape != v.shape:
        raise DimensionError(f"incompatible shapes for <v, w>_H: H {h.shape}, v {v.shape}, w {w.shape}")
    return float(v @ (h @ w))


def conjugate_basis(a, counter: OperationCounter | None = None) -> ConjugateBasis:
    """Gram-Schmidt in the H metric starting from the canonical basis.

    v_m = normalize(u_m + Σ_{k<m} β_mk·v_k) with β_mk = −<v_k, u_m>_H / C_k.
    The projection is applied twice (classical Gram-Schmidt with
    re-orthogonalization); in exact arithmetic the second pass is a no-op.
    """
    h = gram_matrix(a)
    n = h.shape[0]
    scale = float(np.max(np.abs(h)))
    v = np.zeros((n, n))
    hv = np.zeros((n, n))
    c = np.zeros(n)
    tally = counter.add if counter is not None else (lambda _count: None)
    tally(np.shape(a)[0] * n * n)  # AᵀA
    for m in range(n):
        row = np.zeros(n)
        row[m] = 1.0
        if m:
            # <v_k, u_m>_H is the m-th entry of H·v_k
            row += (-hv[:m, m] / c[:m]) @ v[:m]
            tally(m + m * n)
            row += (-(hv[:m] @ row) / c[:m]) @ v[:m]
            tally(2 * m * n + m)
        row /= np.linalg.norm(row)
        tally(2 * n)
        h_row = h @ row
        c_m = float(row @ h_row)
        tally(n * n + n)
        if not c_m > DEGENERACY_TOLERANCE * scale:
            raise SingularGeometryError(
                f"<v, v>_H = {c_m:.3e} at direction {m} is below {DEGENERACY_TOLERANCE:g} x {scale:.3e}",
                index=m,
            )
        v[m], hv[m], c[m] = row, h_row, c_m
    logger.debug(f"Conjugate basis for N={n}: C in [{c.min():.3e}, {c.max():.3e}]")
    return ConjugateBasis(v=v, c=c)


def _check_composition(composition, n: int) -> tuple[int, ...]:
    sizes = tuple(int(a) for a in composition)
    if not sizes or any(a < 1 for a in sizes) or sum(sizes) != n:
        raise DimensionError(f"composition {tuple(composition)} must be positive counts summing to {n}")
    return sizes


def _diagonal_blocks(matrix: np.ndarray, sizes: tuple[int, ...]) -> list[np.ndarray]:
    blocks, start = [], 0
    for size in sizes:
        blocks.append(matrix[start : start + size, start : start + size])
        start += size
    return blocks


def block_conjugate_basis(a, composition) -> BlockBasis:
    """Partial H-orthogonalization making V·H·Vᵀ block diagonal.

    Step k makes the directions after block k H-orthogonal to block k:
    β = −H_k⁻¹·h with H_k the current diagonal block, the new rows are
    u_r + Σ_i β_ir·u_i (normalized) and H is congruence-transformed. The
    product of the step matrices is returned with unit rows.
    """
    a = np.asarray(a, dtype=np.float64)
    h = gram_matrix(a)
    n = h.shape[0]
    sizes = _check_composition(composition, n)
    if len(sizes) == 1:
        return BlockBasis(v=np.eye(n), composition=sizes, blocks=(h,), is_identity=True)

    h_work = np.array(h)
    v = np.eye(n)
    start = 0
    for k, size in enumerate(sizes[:-1]):
        block = slice(start, start + size)
        rest = slice(start + size, n)
        try:
            beta = -pivoted_solve(h_work[block, block], h_work[block, rest], what=f"H block {k}")
        except SingularMatrixError as e:
            raise DecompositionError(str(e), block_index=k) from e
        step = np.eye(n)
        step[rest, block] = beta.T
        step[rest] /= np.linalg.norm(step[rest], axis=1)[:, None]
        h_work = step @ h_work @ step.T
        h_work = np.triu(h_work) + np.triu(h_work, 1).T
        v = step @ v
        start += size

    v /= np.linalg.norm(v, axis=1)[:, None]
    transformed = gram_matrix(a @ v.T)
    logger.debug(f"Block basis for N={n} with composition {sizes}")
    return BlockBasis(v=v, composition=sizes, blocks=tuple(_diagonal_blocks(transformed, sizes)))


def rhombus_coefficients(v, x0, x) -> np.ndarray:
    """D with x0 + Vᵀ·D = x."""
    v = np.asarray(v, dtype=np.float64)
    x0 = as_vector(x0, "x0")
    x = as_vector(x, "x")
    if v.shape != (x.shape[0], x.shape[0]) or x0.shape != x.shape:
        raise DimensionError(f"basis {v.shape} incompatible with points of length {x0.shape[0]}, {x.shape[0]}")
    return pivoted_solve(v.T, x - x0, what="basis")


def exact_coefficients(system: LinearSystem, basis: ConjugateBasis, x0) -> np.ndarray:
    """Rhombus coordinates of A⁻¹b around x0: D_j = (V·Aᵀ·(b − A·x0))_j / C_j."""
    residual = system.b - system.a @ np.asarray(x0, dtype=np.float64)
    return (basis.v @ (system.a.T @ residual)) / basis.c


def containment(system: LinearSystem, basis: ConjugateBasis, x0, l: float) -> float:
    """max_j |D_j| / L for the exact solution; at most 1 while the centered rhombus of
    half-width L/2 around x0 keeps its corners within reach of x*."""
    return float(np.max(np.abs(exact_coefficients(system, basis, x0)))) / l


def suggest_l(
    system: LinearSystem,
    x0,
    x_ref=None,
    basis: ConjugateBasis | None = None,
    safety: float = 1.25,
) -> float:
    """Initial edge length whose rhombus around x0 contains the solution.

    With a reference solution this is 2·safety·max|D_j|; without one it uses
    |D_j| ≤ ||b − A·x0|| / sqrt(C_j), valid because ||A·v_j||² = C_j.
    """
    if not safety >= 1:
        raise PreconditionError(f"safety factor must be >= 1, got {safety}")
    x0 = as_vector(x0, "x0")
    if basis is None:
        basis = conjugate_basis(system.a)
    if x_ref is not None:
        bound = float(np.max(np.abs(rhombus_coefficients(basis.v, x0, x_ref))))
    else:
        bound = float(np.linalg.norm(system.b - system.a @ x0)) / float(np.sqrt(np.min(basis.c)))
    if bound == 0.0:
        bound = 1.0
    return 2.0 * safety * bound


def corner_signs(n: int) -> np.ndarray:
    """±1 sign patterns of all 2^n corners; bit 1 maps to +1, index read MSB first."""
    codes = np.arange(1 << n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1, dtype=np.int64)) & 1
    return 2.0 * bits - 1.0


def verify_subrhombus_property(system: LinearSystem, x0, l: float, basis: ConjugateBasis | None = None) -> bool:
    """Check that the f-minimizing corner of the rhombus owns the sub-rhombus holding x*.

    The rhombus around x0 has edge length L (|D_j| ≤ L/2); its 2^N corners
    y = x0 + (L/4)·Σ_j s_j·v_j are the centres of the sub-rhombi of edge L/2.
    """
    n = system.n
    if n > MAX_CORNER_DIMENSION:
        raise PreconditionError(f"corner enumeration is limited to N <= {MAX_CORNER_DIMENSION}, got {n}")
    if not l > 0:
        raise PreconditionError(f"edge length must be positive, got {l}")
    x0 = as_vector(x0, "x0")
    if basis is None:
        basis = conjugate_basis(system.a)
    x_star = pivoted_solve(system.a, system.b, what="A")
    d = rhombus_coefficients(basis.v, x0, x_star)
    slack = 1e-9 * l
    if np.any(np.abs(d) > l / 2 + slack):
        raise PreconditionError(f"solution lies outside the rhombus: max|D| = {np.max(np.abs(d)):.6g} > L/2 = {l / 2:.6g}")
    e = np.abs(d) - l / 4
    assert np.all(np.abs(e) <= l / 4 + slack), "E_j^2 - L^2/16 <= 0 violated"

    signs = corner_signs(n)
    corners = x0 + (l / 4) * (signs @ basis.v)
    residuals = corners @ system.a.T - system.b
    values = np.einsum("ij,ij->i", residuals, residuals)
    best = int(np.argmin(values))
    offsets = d - (l / 4) * signs[best]
    return bool(np.all(np.abs(offsets) <= l / 4 + slack))


__all__ = [
    "OperationCounter",
    "block_conjugate_basis",
    "conjugate_basis",
    "containment",
    "corner_signs",
    "exact_coefficients",
    "h_inner",
    "rhombus_coefficients",
    "suggest_l",
    "verify_subrhombus_property",
]
