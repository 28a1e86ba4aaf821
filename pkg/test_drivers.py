import unittest
from unittest import mock

import numpy as np

from app.core.drivers import derive_seed, solve_block, solve_rhombus, solve_square, uniform_composition
from app.core.drivers.rhombus import check_diagonal
from app.core.errors import DimensionError, SingularGeometryError, SolverError
from app.core.geometry.h_geometry import conjugate_basis, suggest_l
from app.core.linalg.linsys import random_instance, residual_norm_sq
from app.core.solvers import JIT_AVAILABLE
from app.event_bus import ITERATION, RUN_FINISHED, EventBus
from app.models.linear.linear_system import LinearSystem
from app.models.report.solve_report import IterationParams, SnapshotPolicy, StopReason
from app.models.solver.solver_spec import AnnealingParams, SolveOutcome, SolverSpec
from elimination_oracle import solve_by_elimination

EXAMPLE_SYSTEM = LinearSystem([[1.0, 2.0], [3.0, 4.0]], [5.0, 6.0])
EXAMPLE_SOLUTION = np.array([-4.0, 4.5])
EXHAUSTIVE = SolverSpec(kind="exhaustive")


def suggested(system: LinearSystem, x0) -> float:
    return suggest_l(system, x0, x_ref=solve_by_elimination(system.a, system.b))


def f_rounding_floor(system: LinearSystem) -> float:
    """Absolute rounding noise of evaluating f near the solution."""
    x_ref = solve_by_elimination(system.a, system.b)
    spread = np.linalg.norm(system.a) * np.linalg.norm(x_ref) + np.linalg.norm(system.b)
    return 64.0 * np.finfo(np.float64).eps * float(spread) ** 2


def assert_non_increasing(case: unittest.TestCase, report, system: LinearSystem) -> None:
    # staying put is always on the lattice; the slack covers rounding in the QUBO energies and in f
    scale = float(np.sum(system.a**2))
    floor = f_rounding_floor(system)
    previous = report.initial_f
    for record in report.records:
        slack = 1e-9 * record.l**2 * scale + floor
        case.assertLessEqual(record.f_value, previous + slack, f"iteration {record.iteration}")
        previous = record.f_value


class SquareDriverTests(unittest.TestCase):
    def test_first_iteration_reproduces_the_worked_example(self):
        params = IterationParams(l_initial=10.0, c=2.0, n_iter=1, r_bits=3)
        report = solve_square(EXAMPLE_SYSTEM, [0.0, 0.0], params, EXHAUSTIVE, timing=False)
        np.testing.assert_array_equal(report.x_star, [-5.0, 5.0])
        self.assertEqual(report.final_f, 1.0)
        self.assertEqual(tuple(report.records[0].bits), (0, 1, 0, 1, 1, 0))
        self.assertEqual(report.initial_f, 61.0)

    def test_converges_on_the_worked_example(self):
        params = IterationParams(l_initial=10.0, c=1.5, n_iter=100, r_bits=3)
        report = solve_square(EXAMPLE_SYSTEM, [0.0, 0.0], params, EXHAUSTIVE, timing=False)
        self.assertLessEqual(report.final_f, 1e-10)

    def test_exhaustive_sweep_never_increases_f(self):
        for r_bits in (2, 3):
            for c in (1.2, 1.5):
                params = IterationParams(l_initial=10.0, c=c, n_iter=150, r_bits=r_bits)
                report = solve_square(EXAMPLE_SYSTEM, [0.0, 0.0], params, EXHAUSTIVE, timing=False)
                assert_non_increasing(self, report, EXAMPLE_SYSTEM)
                self.assertLess(report.final_f, report.initial_f)
                self.assertEqual(report.iterations, 150)

    def test_three_bits_cross_the_threshold_faster_with_larger_c(self):
        crossings = {}
        for c in (1.2, 1.5):
            params = IterationParams(l_initial=10.0, c=c, n_iter=150, r_bits=3)
            report = solve_square(EXAMPLE_SYSTEM, [0.0, 0.0], params, EXHAUSTIVE, timing=False)
            self.assertLessEqual(report.final_f, 1e-8)
            crossings[c] = report.first_crossing(1e-8)
        self.assertLess(crossings[1.5], crossings[1.2])

    def test_two_bits_stall_above_the_threshold(self):
        # with R=2 the literal box stops finding descent lattice points long before 1e-8
        for c in (1.2, 1.5):
            params = IterationParams(l_initial=10.0, c=c, n_iter=150, r_bits=2)
            report = solve_square(EXAMPLE_SYSTEM, [0.0, 0.0], params, EXHAUSTIVE, timing=False)
            self.assertGreater(min(report.f_trace), 1e-6, f"c={c}")
            self.assertLess(report.final_f, 1e-1 * report.initial_f, f"c={c}")

    def test_rounding_floor_covers_evaluation_noise(self):
        system = random_instance(40, 0.0, 200.0, 7)
        x_ref = solve_by_elimination(system.a, system.b)
        nudged = np.nextafter(x_ref, np.inf)
        drift = abs(residual_norm_sq(system, nudged) - residual_norm_sq(system, x_ref))
        self.assertLessEqual(drift, f_rounding_floor(system))

    def test_one_dimensional_centred_box(self):
        system = LinearSystem([[2.0]], [4.0])
        params = IterationParams(l_initial=4.0, c=2.0, n_iter=30, r_bits=1, early_stop_f=None)
        report = solve_square(system, [0.0], params, EXHAUSTIVE, shift=0.5, timing=False)
        self.assertEqual(report.iterations, 30)
        self.assertLessEqual(abs(report.x_star[0] - 2.0), 4.0 * 2.0**-29)

    def test_edge_length_schedule_is_exact(self):
        params = IterationParams(l_initial=10.0, c=1.5, n_iter=40, r_bits=2)
        report = solve_square(EXAMPLE_SYSTEM, [0.0, 0.0], params, EXHAUSTIVE, timing=False)
        expected, l = [], 10.0
        for _ in range(40):
            expected.append(l)
            l = l / 1.5
        self.assertEqual(report.l_sequence, expected)

    def test_recorded_f_is_recomputed_from_x(self):
        params = IterationParams(l_initial=10.0, c=1.5, n_iter=10, r_bits=2, snapshots="all")
        report = solve_square(EXAMPLE_SYSTEM, [0.0, 0.0], params, EXHAUSTIVE, timing=False)
        for record in report.records:
            self.assertEqual(record.f_value, residual_norm_sq(EXAMPLE_SYSTEM, record.x))

    def test_exhaustive_size_guard(self):
        system = random_instance(9, 0.0, 1.0, 0)
        params = IterationParams(l_initial=1.0, c=2.0, n_iter=1, r_bits=3)
        with self.assertRaises(SolverError):
            solve_square(system, np.zeros(9), params, EXHAUSTIVE)

    def test_x0_length_mismatch(self):
        params = IterationParams(l_initial=1.0, c=2.0, n_iter=1)
        with self.assertRaises(DimensionError):
            solve_square(EXAMPLE_SYSTEM, [0.0], params, EXHAUSTIVE)

    def test_worse_solver_answer_is_recorded_not_fatal(self):
        answers = [
            SolveOutcome(q=np.array([0, 1, 0, 1, 1, 0], dtype=np.int8), energy=0.0, evaluations=1),
            SolveOutcome(q=np.zeros(6, dtype=np.int8), energy=0.0, evaluations=1),
        ]
        params = IterationParams(l_initial=10.0, c=2.0, n_iter=2, r_bits=3)
        with mock.patch("app.core.drivers.square.solve_qubo", side_effect=answers):
            report = solve_square(EXAMPLE_SYSTEM, [0.0, 0.0], params, EXHAUSTIVE, timing=False)
        self.assertEqual(report.iterations, 2)
        self.assertFalse(report.records[0].regressed)
        self.assertTrue(report.records[1].regressed)
        self.assertEqual(report.regressions, 1)


class RhombusDriverTests(unittest.TestCase):
    def test_identity_is_bisection(self):
        b = np.array([3.1, -2.7, 0.4, -3.9])
        system = LinearSystem(np.eye(4), b)
        params = IterationParams(l_initial=8.0, c=2.0, n_iter=40, snapshots="all")
        report = solve_rhombus(system, np.zeros(4), params, timing=False)
        for record in report.records:
            bound = 8.0 * 2.0 ** -(record.iteration + 1)
            self.assertLessEqual(np.max(np.abs(record.x - b)), bound * (1 + 1e-12))

    def test_worked_example(self):
        params = IterationParams(l_initial=20.0, c=2.0, n_iter=50)
        report = solve_rhombus(EXAMPLE_SYSTEM, [0.0, 0.0], params, timing=False)
        self.assertLessEqual(np.linalg.norm(report.x_star - EXAMPLE_SOLUTION), 1e-9)

    def test_contraction_envelope(self):
        system = random_instance(200, 0.0, 200.0, 7)
        x0 = np.zeros(200)
        basis = conjugate_basis(system.a)
        params = IterationParams(l_initial=suggested(system, x0), c=2.0, n_iter=60)
        report = solve_rhombus(system, x0, params, basis=basis, timing=False)
        total_c = float(np.sum(basis.c))
        for record in report.records:
            envelope = (record.l / 2.0) ** 2 * total_c
            if envelope < 1e-10 * report.initial_f:
                break
            self.assertLessEqual(record.f_value, envelope * (1 + 1e-9))
        self.assertLessEqual(report.final_f, 1e-8 * report.initial_f)

    def test_large_instance_stays_contained_and_matches_elimination(self):
        system = random_instance(500, 0.0, 200.0, 500)
        x0 = np.zeros(500)
        l0 = suggested(system, x0)
        params = IterationParams(l_initial=l0, c=2.0, n_iter=60, track_containment=True)
        report = solve_rhombus(system, x0, params, timing=False)
        self.assertLessEqual(report.metadata["initial_containment"], 1.0)
        for record in report.records:
            if record.l < 1e-6 * l0:
                break
            self.assertLessEqual(record.containment, 1.0, f"iteration {record.iteration}")
        self.assertLessEqual(report.final_f, 1e-8 * report.initial_f)
        oracle_f = residual_norm_sq(system, solve_by_elimination(system.a, system.b))
        self.assertLessEqual(report.final_f, oracle_f)

    def test_shrinking_too_fast_loses_the_solution(self):
        system = random_instance(500, 0.0, 200.0, 500)
        x0 = np.zeros(500)
        params = IterationParams(l_initial=suggested(system, x0), c=4.0, n_iter=60, track_containment=True)
        report = solve_rhombus(system, x0, params, timing=False)
        escaped = any(record.containment > 1.0 for record in report.records[:10])
        self.assertTrue(escaped or report.final_f >= 1e-3 * report.initial_f)

    def test_debug_checks_accept_the_conjugate_lattice(self):
        params = IterationParams(l_initial=20.0, c=2.0, n_iter=5, debug_checks=True)
        report = solve_rhombus(EXAMPLE_SYSTEM, [0.0, 0.0], params, timing=False)
        self.assertEqual(report.iterations, 5)

    def test_diagonal_check_rejects_a_coupled_qubo(self):
        with self.assertRaises(SingularGeometryError):
            check_diagonal(EXAMPLE_SYSTEM.a, np.zeros(2))

    def test_early_stop(self):
        params = IterationParams(l_initial=20.0, c=2.0, n_iter=100, early_stop_f=1e-6)
        report = solve_rhombus(EXAMPLE_SYSTEM, [0.0, 0.0], params, timing=False)
        self.assertLess(report.iterations, 100)
        self.assertTrue(report.converged)
        self.assertEqual(report.stop_reason, StopReason.THRESHOLD)
        self.assertLessEqual(report.final_f, 1e-6)

    def test_runs_to_the_budget_without_threshold(self):
        params = IterationParams(l_initial=20.0, c=2.0, n_iter=7)
        report = solve_rhombus(EXAMPLE_SYSTEM, [0.0, 0.0], params, timing=False)
        self.assertEqual(report.iterations, 7)
        self.assertFalse(report.converged)
        self.assertEqual(report.stop_reason, StopReason.ITERATIONS)


class SnapshotTests(unittest.TestCase):
    def run_with(self, policy):
        params = IterationParams(l_initial=20.0, c=2.0, n_iter=6, snapshots=policy)
        return solve_rhombus(EXAMPLE_SYSTEM, [0.0, 0.0], params, timing=False)

    def test_final_only(self):
        report = self.run_with(SnapshotPolicy.FINAL)
        self.assertEqual(len(report.iterates()), 1)
        np.testing.assert_array_equal(report.records[-1].x, report.x_star)

    def test_first_and_last(self):
        report = self.run_with("first-last")
        self.assertEqual([r.iteration for r in report.records if r.x is not None], [0, 5])

    def test_all(self):
        report = self.run_with("all")
        self.assertEqual(len(report.iterates()), 6)
        self.assertEqual(len(report.f_trace), 6)


class EventTests(unittest.TestCase):
    def test_iterations_and_completion_are_published(self):
        bus = EventBus()
        seen, finished = [], []
        bus.subscribe(ITERATION, lambda topic, name, record: seen.append((name, record.iteration)))
        bus.subscribe(RUN_FINISHED, lambda topic, name, report: finished.append(report))
        params = IterationParams(l_initial=20.0, c=2.0, n_iter=4)
        report = solve_rhombus(EXAMPLE_SYSTEM, [0.0, 0.0], params, bus=bus, name="demo", timing=False)
        self.assertEqual(seen, [("demo", k) for k in range(4)])
        self.assertEqual(len(finished), 1)
        self.assertIs(finished[0], report)


class BlockDriverTests(unittest.TestCase):
    def test_single_block_equals_the_centred_square_driver(self):
        cases = [
            (random_instance(3, -5.0, 5.0, 1), 3, EXHAUSTIVE),
            (random_instance(6, -5.0, 5.0, 2), 2, SolverSpec(kind="sa", seed=3, annealing=AnnealingParams(sweeps=30, restarts=2))),
            (random_instance(6, -5.0, 5.0, 4), 2, SolverSpec(kind="tabu", seed=5)),
        ]
        for system, r_bits, solver in cases:
            x0 = np.zeros(system.n)
            params = IterationParams(l_initial=suggested(system, x0), c=1.5, n_iter=25, r_bits=r_bits, snapshots="all")
            square = solve_square(system, x0, params, solver, shift=0.5, timing=False)
            block = solve_block(system, x0, params, (system.n,), solver, timing=False)
            self.assertEqual(square.f_trace, block.f_trace)
            for left, right in zip(square.records, block.records):
                np.testing.assert_array_equal(left.x, right.x)
                np.testing.assert_array_equal(left.bits, right.bits)

    def test_unit_blocks_follow_the_rhombus_driver(self):
        # LU block steps and Gram-Schmidt agree to rounding, well inside 1e-11 of the iterate scale
        for seed in range(20):
            n = 2 + seed % 19
            system = random_instance(n, 0.0, 200.0, 300 + seed)
            x0 = np.zeros(n)
            params = IterationParams(l_initial=suggested(system, x0), c=2.0, n_iter=50, snapshots="all")
            rhombus = solve_rhombus(system, x0, params, timing=False)
            block = solve_block(system, x0, params, (1,) * n, EXHAUSTIVE, timing=False)
            self.assertEqual(len(block.records), len(rhombus.records))
            for left, right in zip(rhombus.records, block.records):
                scale = float(np.max(np.abs(left.x)))
                np.testing.assert_allclose(
                    right.x, left.x, rtol=1e-11, atol=1e-11 * scale, err_msg=f"seed {seed} iteration {left.iteration}"
                )

    def test_exhaustive_blocks_converge(self):
        system = random_instance(40, 0.0, 200.0, 7)
        x0 = np.zeros(40)
        params = IterationParams(l_initial=suggested(system, x0), c=1.2, n_iter=300, r_bits=2)
        report = solve_block(system, x0, params, uniform_composition(40, 8), EXHAUSTIVE, timing=False)
        assert_non_increasing(self, report, system)
        self.assertLessEqual(report.final_f, 1e-10 * report.initial_f)

    @unittest.skipUnless(JIT_AVAILABLE, "needs compiled annealing kernels")
    def test_annealed_blocks_converge(self):
        system = random_instance(100, 0.0, 200.0, 100)
        params = IterationParams(l_initial=100.0, c=1.1, n_iter=300, r_bits=3, early_stop_f=None)
        solver = SolverSpec(kind="sa", seed=11, annealing=AnnealingParams(sweeps=2000, restarts=4))
        report = solve_block(system, np.zeros(100), params, uniform_composition(100, 10), solver, jobs=4, timing=False)
        self.assertLessEqual(report.final_f, 1e-6 * report.initial_f)

    def test_order_and_threads_do_not_change_the_iterates(self):
        system = random_instance(12, 0.0, 10.0, 12)
        x0 = np.zeros(12)
        params = IterationParams(l_initial=suggested(system, x0), c=1.5, n_iter=15, r_bits=2)
        solver = SolverSpec(kind="sa", seed=9, annealing=AnnealingParams(sweeps=40, restarts=2))
        reference = solve_block(system, x0, params, (4, 4, 4), solver, timing=False)
        shuffled = solve_block(system, x0, params, (4, 4, 4), solver, order=(2, 0, 1), timing=False)
        threaded = solve_block(system, x0, params, (4, 4, 4), solver, jobs=3, order=(1, 2, 0), timing=False)
        for other in (shuffled, threaded):
            self.assertEqual(other.f_trace, reference.f_trace)
            np.testing.assert_array_equal(other.x_star, reference.x_star)

    def test_block_seeds_differ(self):
        self.assertNotEqual(derive_seed(5, 0, 0), derive_seed(5, 0, 1))
        self.assertNotEqual(derive_seed(5, 0, 0), derive_seed(5, 1, 0))
        self.assertEqual(derive_seed(5, 3, 2), derive_seed(5, 3, 2))

    def test_oversized_block_names_its_index(self):
        system = random_instance(20, 0.0, 1.0, 3)
        params = IterationParams(l_initial=1.0, c=2.0, n_iter=1, r_bits=3)
        with self.assertRaises(SolverError) as ctx:
            solve_block(system, np.zeros(20), params, (4, 10, 6), EXHAUSTIVE)
        self.assertEqual(ctx.exception.block_index, 1)

    def test_bad_order(self):
        system = random_instance(4, 0.0, 1.0, 3)
        params = IterationParams(l_initial=1.0, c=2.0, n_iter=1)
        with self.assertRaises(DimensionError):
            solve_block(system, np.zeros(4), params, (2, 2), EXHAUSTIVE, order=(0, 0))

    def test_uniform_composition(self):
        self.assertEqual(uniform_composition(10, 5), (5, 5))
        self.assertEqual(uniform_composition(10, 4), (4, 4, 2))
        self.assertEqual(uniform_composition(3, 5), (3,))


if __name__ == "__main__":
    unittest.main()
