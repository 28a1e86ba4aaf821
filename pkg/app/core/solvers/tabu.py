import numpy as np

from ...models.qubo.qubo_problem import QuboProblem
from ...models.solver.solver_spec import SolveOutcome, SolverKind
from ...utils.logger import logger
from ..linalg.linsys import make_rng
from .base import QuboSolver
from .kernels import tabu_walk


class TabuSolver(QuboSolver):
    """Steepest single-flip descent; recently flipped bits stay tabu for ``tenure`` moves
    unless flipping them beats the incumbent."""

    kind = SolverKind.TABU

    def solve(self, problem: QuboProblem) -> SolveOutcome:
        self._require_nonempty(problem)
        params = self.spec.tabu
        q_matrix = np.ascontiguousarray(problem.q_matrix)
        n = problem.dimension
        rng = make_rng(self.spec.seed)
        best_x, best_energy = None, np.inf
        for _ in range(params.restarts):
            start = rng.integers(0, 2, n).astype(np.float64)
            x, walk_energy = tabu_walk(q_matrix, start, params.tenure, params.max_moves)
            if walk_energy < best_energy:
                best_x, best_energy = x, walk_energy
        logger.debug(f"Tabu n={n} moves={params.max_moves} restarts={params.restarts}: best {best_energy:.6g}")
        return self._outcome(problem, best_x, params.restarts * params.max_moves * n)
