import abc

import numpy as np

from ...models.qubo.qubo_problem import QuboProblem, as_bits
from ...models.solver.solver_spec import SolveOutcome, SolverKind, SolverSpec
from ..encoding.qubo_encoder import energy
from ..errors import SolverError


class QuboSolver(abc.ABC):
    """
    Abstract base class for QUBO minimisers.
    """

    kind: SolverKind

    def __init__(self, spec: SolverSpec):
        self.spec = spec

    @abc.abstractmethod
    def solve(self, problem: QuboProblem) -> SolveOutcome:
        """
        Minimise qᵀQq over binary q.

        :param problem: The QUBO to minimise.
        :return: Best assignment found, its recomputed energy and the number of evaluations.
        """

    def _require_nonempty(self, problem: QuboProblem) -> None:
        if problem.dimension == 0:
            raise SolverError(f"{self.kind.value} solver needs at least one variable")

    @staticmethod
    def _outcome(problem: QuboProblem, bits: np.ndarray, evaluations: int) -> SolveOutcome:
        q = as_bits(np.rint(bits))
        return SolveOutcome(q=q, energy=energy(problem, q), evaluations=int(evaluations))
