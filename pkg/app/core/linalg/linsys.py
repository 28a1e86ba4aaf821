import warnings

import numpy as np
import scipy.linalg

from ...models.linear.linear_system import LinearSystem, as_matrix, as_vector
from ...utils.logger import logger
from ..errors import DimensionError, SingularMatrixError

PIVOT_TOLERANCE = 1e-10
MAX_INSTANCE_ATTEMPTS = 8


def residual_norm_sq(system: LinearSystem, x) -> float:
    """f(x) = ||A·x − b||²."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (system.n,):
        raise DimensionError(f"x has shape {x.shape}, expected ({system.n},)")
    residual = system.a @ x - system.b
    return float(residual @ residual)


def gram_matrix(a) -> np.ndarray:
    """H = AᵀA, mirrored from its upper triangle so it is exactly symmetric."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    h = a.T @ a
    h = np.triu(h) + np.triu(h, 1).T
    h.setflags(write=False)
    return h


def lu_factor(a, what: str = "matrix", tolerance: float = PIVOT_TOLERANCE):
    """Partial-pivoting LU of *a*; raises when a pivot falls below tolerance·max|a|."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError(f"{what} is identically zero")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    smallest = float(np.min(np.abs(np.diag(lu))))
    if smallest < tolerance * scale:
        raise SingularMatrixError(
            f"{what} is numerically singular (pivot {smallest:.3e} < {tolerance:g} x {scale:.3e})"
        )
    return lu, piv


def pivoted_solve(a, rhs, what: str = "matrix", tolerance: float = PIVOT_TOLERANCE) -> np.ndarray:
    factors = lu_factor(a, what=what, tolerance=tolerance)
    return scipy.linalg.lu_solve(factors, np.asarray(rhs, dtype=np.float64), check_finite=False)


def is_nonsingular(a, tolerance: float = PIVOT_TOLERANCE) -> bool:
    try:
        lu_factor(a, tolerance=tolerance)
    except SingularMatrixError:
        return False
    return True


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream (O'Neill's permuted congruential generator, 128-bit state, 64-bit output)."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def _uniform(rng: np.random.Generator, lo: float, hi: float, size) -> np.ndarray:
    values = lo + (hi - lo) * rng.random(size)
    # rounding can land exactly on hi; keep the interval half-open
    return np.minimum(values, np.nextafter(hi, lo))


def random_instance(n: int, lo: float, hi: float, seed: int, max_attempts: int = MAX_INSTANCE_ATTEMPTS) -> LinearSystem:
    """Seeded system with A and b entries i.i.d. uniform on [lo, hi).

    A is drawn first (row-major), then b; singular draws are redrawn from the
    same stream up to *max_attempts* times.
    """
    if int(n) != n or n < 1:
        raise DimensionError(f"n must be >= 1, got {n}")
    if not lo < hi:
        raise DimensionError(f"lo must be below hi, got [{lo}, {hi})")
    n = int(n)
    rng = make_rng(seed)
    for attempt in range(1, max_attempts + 1):
        a = _uniform(rng, lo, hi, (n, n))
        b = _uniform(rng, lo, hi, n)
        if is_nonsingular(a):
            return LinearSystem(a, b)
        logger.log("RETRY", f"Singular draw for n={n} seed={seed} (attempt {attempt}/{max_attempts})")
    raise SingularMatrixError(f"no nonsingular instance for n={n} seed={seed} after {max_attempts} attempts")


__all__ = [
    "as_matrix",
    "as_vector",
    "gram_matrix",
    "is_nonsingular",
    "lu_factor",
    "make_rng",
    "pivoted_solve",
    "random_instance",
    "residual_norm_sq",
]
