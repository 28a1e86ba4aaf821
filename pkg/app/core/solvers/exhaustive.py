import numpy as np

from ...models.qubo.qubo_problem import QuboProblem
from ...models.solver.solver_spec import SolveOutcome, SolverKind
from ...utils.logger import logger
from ..errors import SolverError
from .base import QuboSolver

MAX_EXHAUSTIVE_DIMENSION = 24
CHUNK_BITS = 14


def enumeration_chunk(n: int, start: int, stop: int) -> np.ndarray:
    """Assignments for integers start..stop-1, q[0] being the most significant bit."""
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.float64)


class ExhaustiveSolver(QuboSolver):
    """Global minimum by enumeration; ties go to the smallest integer code."""

    kind = SolverKind.EXHAUSTIVE

    def solve(self, problem: QuboProblem) -> SolveOutcome:
        n = problem.dimension
        if n > MAX_EXHAUSTIVE_DIMENSION:
            raise SolverError(f"exhaustive enumeration is limited to {MAX_EXHAUSTIVE_DIMENSION} variables, got {n}")
        q_matrix = problem.q_matrix
        total = 1 << n
        step = 1 << min(n, CHUNK_BITS)
        best_code, best_energy = 0, np.inf
        for start in range(0, total, step):
            block = enumeration_chunk(n, start, min(start + step, total))
            energies = np.einsum("ij,ij->i", block @ q_matrix, block)
            k = int(np.argmin(energies))
            if energies[k] < best_energy:
                best_code, best_energy = start + k, float(energies[k])
        bits = enumeration_chunk(n, best_code, best_code + 1)[0]
        logger.debug(f"Exhaustive search over {total} assignments: best code {best_code}")
        return self._outcome(problem, bits, total)
