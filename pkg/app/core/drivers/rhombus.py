import numpy as np

from ...event_bus import EventBus
from ...models.geometry.basis_model import ConjugateBasis
from ...models.linear.linear_system import LinearSystem, as_vector
from ...models.report.solve_report import IterationParams, SolveReport
from ...utils.logger import logger
from ..encoding.qubo_encoder import advance, shifted_rhs
from ..errors import DimensionError, SingularGeometryError
from ..geometry.basis_cache import cached_conjugate_basis
from ..geometry.h_geometry import containment
from ..linalg.linsys import gram_matrix, residual_norm_sq
from .iteration import IterationTracker, Stopwatch

DIAGONAL_TOLERANCE = 1e-8


def rhombus_bits(basis: ConjugateBasis, linear: np.ndarray) -> np.ndarray:
    """Minimiser of the diagonal QUBO Σ_i (C_i − 2·linear_i)·q_i; zero coefficients give 0."""
    return (basis.c - 2.0 * linear < 0.0).astype(np.int8)


def check_diagonal(a_v: np.ndarray, linear: np.ndarray) -> None:
    full = np.array(gram_matrix(a_v))
    full[np.diag_indices_from(full)] -= 2.0 * linear
    diagonal = np.abs(np.diag(full))
    off_diagonal = np.abs(full - np.diag(np.diag(full)))
    if off_diagonal.size and off_diagonal.max() > DIAGONAL_TOLERANCE * diagonal.max():
        raise SingularGeometryError(
            f"rhombus QUBO is not diagonal: off-diagonal {off_diagonal.max():.3e} vs diagonal {diagonal.max():.3e}"
        )


def solve_rhombus(
    system: LinearSystem,
    x0,
    params: IterationParams,
    basis: ConjugateBasis | None = None,
    bus: EventBus | None = None,
    name: str | None = None,
    timing: bool = True,
) -> SolveReport:
    """Iterate in the H-orthogonal lattice with one bit per direction.

    The QUBO is diagonal there, so every iteration is the sign rule
    q_i = [C_i − 2(A_qᵀb_q)_i < 0] followed by x0 ← x0 + L·Vᵀ(q − I/2), L ← L/c.
    """
    x = as_vector(x0, "x0")
    if x.shape[0] != system.n:
        raise DimensionError(f"x0 has length {x.shape[0]}, system has {system.n}")
    if params.r_bits != 1:
        logger.debug(f"rhombus driver uses one bit per direction; ignoring r_bits={params.r_bits}")
    if basis is None:
        basis = cached_conjugate_basis(system.a)
    a_v = system.a @ basis.v.T
    metadata = {"n": system.n, "r_bits": 1, "c": params.c, "l_initial": params.l_initial}
    if params.track_containment:
        metadata["initial_containment"] = containment(system, basis, x, params.l_initial)
    tracker = IterationTracker("rhombus", params, residual_norm_sq(system, x), name=name, bus=bus, metadata=metadata)
    clock = Stopwatch(timing)
    l = params.l_initial
    stopped = False
    for k in range(params.n_iter):
        clock.start()
        b_q = shifted_rhs(system.a, a_v, system.b, x, l, 0.5)
        linear = a_v.T @ b_q
        if params.debug_checks:
            check_diagonal(a_v, linear)
        bits = rhombus_bits(basis, linear)
        x = advance(x, l, bits.astype(np.float64), 0.5, basis.v)
        elapsed = clock.elapsed()
        l_next = l / params.c
        ratio = containment(system, basis, x, l_next) if params.track_containment else None
        stopped = tracker.record(k, l, residual_norm_sq(system, x), elapsed, x, bits, containment=ratio)
        l = l_next
        if stopped:
            break
    return tracker.finish(x, stopped)
