from ...models.qubo.qubo_problem import QuboProblem
from ...models.solver.solver_spec import SolveOutcome, SolverKind, SolverSpec
from ..errors import ConfigError
from .annealing import SimulatedAnnealingSolver, beta_schedule
from .base import QuboSolver
from .exhaustive import MAX_EXHAUSTIVE_DIMENSION, ExhaustiveSolver
from .kernels import JIT_AVAILABLE
from .tabu import TabuSolver


def create_solver(spec: SolverSpec) -> QuboSolver:
    """
    Creates and returns the QuboSolver matching spec.kind.

    :param spec: Solver kind, seed and heuristic parameters.
    :return: An instance of the corresponding QuboSolver.
    :raises ConfigError: If the solver kind is not supported.
    """
    kind_to_class = {
        SolverKind.EXHAUSTIVE: ExhaustiveSolver,
        SolverKind.SIMULATED_ANNEALING: SimulatedAnnealingSolver,
        SolverKind.TABU: TabuSolver,
    }
    solver_class = kind_to_class.get(SolverKind.parse(spec.kind))
    if not solver_class:
        raise ConfigError(f"Unsupported solver: {spec.kind}")
    return solver_class(spec)


def solve_qubo(problem: QuboProblem, spec: SolverSpec) -> SolveOutcome:
    return create_solver(spec).solve(problem)


__all__ = [
    "JIT_AVAILABLE",
    "MAX_EXHAUSTIVE_DIMENSION",
    "ExhaustiveSolver",
    "QuboSolver",
    "SimulatedAnnealingSolver",
    "TabuSolver",
    "beta_schedule",
    "create_solver",
    "solve_qubo",
]
