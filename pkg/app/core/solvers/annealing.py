import numpy as np

from ...models.qubo.qubo_problem import QuboProblem
from ...models.solver.solver_spec import SolveOutcome, SolverKind
from ...utils.logger import logger
from ..linalg.linsys import make_rng
from .base import QuboSolver
from .kernels import anneal_chain


def default_betas(q_matrix: np.ndarray) -> tuple[float, float]:
    """0.01/<|Q|> and 10/<|Q|>, <|Q|> the mean absolute entry."""
    scale = float(np.mean(np.abs(q_matrix))) if q_matrix.size else 0.0
    if scale == 0.0:
        scale = 1.0
    return 0.01 / scale, 10.0 / scale


def beta_schedule(beta_initial: float, beta_final: float, sweeps: int) -> np.ndarray:
    """Geometric inverse-temperature ladder, one entry per sweep, ending at beta_final."""
    if sweeps == 1:
        return np.array([float(beta_final)])
    return np.geomspace(beta_initial, beta_final, sweeps)


class SimulatedAnnealingSolver(QuboSolver):
    kind = SolverKind.SIMULATED_ANNEALING

    def solve(self, problem: QuboProblem) -> SolveOutcome:
        self._require_nonempty(problem)
        params = self.spec.annealing
        q_matrix = np.ascontiguousarray(problem.q_matrix)
        n = problem.dimension
        default_initial, default_final = default_betas(q_matrix)
        betas = beta_schedule(
            params.beta_initial if params.beta_initial is not None else default_initial,
            params.beta_final if params.beta_final is not None else default_final,
            params.sweeps,
        )
        rng = make_rng(self.spec.seed)
        best_x, best_energy = None, np.inf
        for _ in range(params.restarts):
            start = rng.integers(0, 2, n).astype(np.float64)
            uniforms = rng.random((params.sweeps, n))
            x, chain_energy = anneal_chain(q_matrix, start, betas, uniforms)
            if chain_energy < best_energy:
                best_x, best_energy = x, chain_energy
        logger.debug(f"Annealing n={n} sweeps={params.sweeps} restarts={params.restarts}: best {best_energy:.6g}")
        return self._outcome(problem, best_x, params.restarts * params.sweeps * n)
