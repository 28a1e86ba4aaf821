import numpy as np

from ...event_bus import EventBus
from ...models.linear.linear_system import LinearSystem, as_vector
from ...models.qubo.qubo_problem import SearchBox
from ...models.report.solve_report import IterationParams, SolveReport
from ...models.solver.solver_spec import SolverKind, SolverSpec
from ..encoding.qubo_encoder import box_decode, encode_square
from ..errors import DimensionError, SolverError
from ..linalg.linsys import residual_norm_sq
from ..solvers import MAX_EXHAUSTIVE_DIMENSION, solve_qubo
from .iteration import IterationTracker, Stopwatch, derive_seed


def solve_square(
    system: LinearSystem,
    x0,
    params: IterationParams,
    solver: SolverSpec,
    shift: float = 1.0,
    bus: EventBus | None = None,
    name: str | None = None,
    timing: bool = True,
) -> SolveReport:
    """Iterate the square-lattice encoding: minimise the QUBO of the current box,
    move to the decoded point and shrink L by c.

    shift=1 places the box at [x0 − L, x0 + L(1 − 2^(1−R))]; shift=0.5 centres it on x0.
    """
    x = as_vector(x0, "x0")
    if x.shape[0] != system.n:
        raise DimensionError(f"x0 has length {x.shape[0]}, system has {system.n}")
    if solver.kind is SolverKind.EXHAUSTIVE and system.n * params.r_bits > MAX_EXHAUSTIVE_DIMENSION:
        raise SolverError(
            f"exhaustive solver needs N·R <= {MAX_EXHAUSTIVE_DIMENSION}, got {system.n}·{params.r_bits}"
        )
    tracker = IterationTracker(
        "square",
        params,
        residual_norm_sq(system, x),
        name=name,
        bus=bus,
        metadata={"n": system.n, "r_bits": params.r_bits, "c": params.c, "l_initial": params.l_initial,
                  "shift": shift, "solver": solver.to_dict()},
    )
    clock = Stopwatch(timing)
    l = params.l_initial
    stopped = False
    for k in range(params.n_iter):
        clock.start()
        box = SearchBox(x0=x, l=l, r=params.r_bits, shift=shift)
        outcome = solve_qubo(encode_square(system, box), solver.with_seed(derive_seed(solver.seed, k)))
        x = box_decode(box, outcome.q)
        elapsed = clock.elapsed()
        stopped = tracker.record(k, l, residual_norm_sq(system, x), elapsed, x, outcome.q)
        l = l / params.c
        if stopped:
            break
    return tracker.finish(np.asarray(x), stopped)
