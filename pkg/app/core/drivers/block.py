from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ...event_bus import EventBus
from ...models.geometry.basis_model import BlockBasis
from ...models.linear.linear_system import LinearSystem, as_vector
from ...models.qubo.qubo_problem import QuboProblem
from ...models.report.solve_report import IterationParams, SolveReport
from ...models.solver.solver_spec import SolveOutcome, SolverKind, SolverSpec
from ..encoding.qubo_encoder import advance, bit_weights, bits_to_xhat, lattice_qubo, shifted_rhs
from ..errors import DimensionError, SolverError
from ..geometry.basis_cache import cached_block_basis
from ..linalg.linsys import residual_norm_sq
from ..solvers import MAX_EXHAUSTIVE_DIMENSION, solve_qubo
from .iteration import IterationTracker, Stopwatch, derive_seed


def uniform_composition(n: int, k: int) -> tuple[int, ...]:
    """⌈n/k⌉ blocks of size k, the last one smaller when k does not divide n."""
    if k < 1:
        raise DimensionError(f"block size must be >= 1, got {k}")
    sizes = [k] * (n // k)
    if n % k:
        sizes.append(n % k)
    return tuple(sizes)


def _solve_block(index: int, problem: QuboProblem, spec: SolverSpec) -> SolveOutcome:
    try:
        return solve_qubo(problem, spec)
    except SolverError as e:
        if e.block_index is not None:
            raise
        raise SolverError(str(e), block_index=index) from e


def solve_block(
    system: LinearSystem,
    x0,
    params: IterationParams,
    composition,
    solver: SolverSpec,
    basis: BlockBasis | None = None,
    jobs: int = 1,
    order=None,
    bus: EventBus | None = None,
    name: str | None = None,
    timing: bool = True,
) -> SolveReport:
    """Iterate on the block-diagonal decomposition of H.

    Every iteration builds one sub-QUBO kron(H_j, w·wᵀ) − 2·Diag(kron((A_qᵀb_q)_j, w))
    per block, solves them independently (in *order*, on *jobs* threads), joins the
    bits by block index and moves to x0 + L·Vᵀ(x̂ − I/2).
    """
    x = as_vector(x0, "x0")
    if x.shape[0] != system.n:
        raise DimensionError(f"x0 has length {x.shape[0]}, system has {system.n}")
    if basis is None:
        basis = cached_block_basis(system.a, composition)
    elif tuple(int(size) for size in composition) != basis.composition:
        raise DimensionError(f"composition {tuple(composition)} does not match the basis {basis.composition}")
    sizes, offsets = basis.composition, basis.offsets
    if solver.kind is SolverKind.EXHAUSTIVE:
        for j, size in enumerate(sizes):
            if size * params.r_bits > MAX_EXHAUSTIVE_DIMENSION:
                raise SolverError(
                    f"exhaustive solver needs a·R <= {MAX_EXHAUSTIVE_DIMENSION}, got {size}·{params.r_bits}",
                    block_index=j,
                )
    order = tuple(range(len(sizes))) if order is None else tuple(int(j) for j in order)
    if sorted(order) != list(range(len(sizes))):
        raise DimensionError(f"block order {order} is not a permutation of {len(sizes)} blocks")

    a_v = system.a if basis.is_identity else system.a @ basis.v.T
    v = None if basis.is_identity else basis.v
    weights = bit_weights(params.r_bits)
    tracker = IterationTracker(
        "block",
        params,
        residual_norm_sq(system, x),
        name=name,
        bus=bus,
        metadata={"n": system.n, "r_bits": params.r_bits, "c": params.c, "l_initial": params.l_initial,
                  "composition": list(sizes), "solver": solver.to_dict(), "jobs": jobs},
    )
    clock = Stopwatch(timing)
    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    l = params.l_initial
    stopped = False
    try:
        for k in range(params.n_iter):
            clock.start()
            b_q = shifted_rhs(system.a, a_v, system.b, x, l, 0.5)
            linear = a_v.T @ b_q
            problems = {}
            for j in order:
                start, size = offsets[j], sizes[j]
                q_matrix = lattice_qubo(basis.blocks[j], linear[start : start + size], weights)
                problems[j] = QuboProblem(q_matrix)
            specs = {j: solver.with_seed(derive_seed(solver.seed, k, j)) for j in order}
            if pool is None:
                outcomes = {j: _solve_block(j, problems[j], specs[j]) for j in order}
            else:
                futures = {j: pool.submit(_solve_block, j, problems[j], specs[j]) for j in order}
                outcomes = {j: futures[j].result() for j in order}
            bits = np.concatenate([outcomes[j].q for j in range(len(sizes))])
            xhat = bits_to_xhat(bits, system.n, params.r_bits)
            x = advance(x, l, xhat, 0.5, v)
            elapsed = clock.elapsed()
            stopped = tracker.record(k, l, residual_norm_sq(system, x), elapsed, x, bits)
            l = l / params.c
            if stopped:
                break
    finally:
        if pool is not None:
            pool.shutdown(wait=True)
    return tracker.finish(x, stopped)
