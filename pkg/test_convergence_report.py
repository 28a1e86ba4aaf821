import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from app.core.experiments.runner import run_experiment
from app.models.experiment.experiment_config import ExperimentConfig, InstanceSource
from app.models.report.solve_report import IterationParams
from scripts import convergence_report


def example_rhombus_sweep(out_dir: Path) -> ExperimentConfig:
    return ExperimentConfig(
        name="example",
        source=InstanceSource(matrix=((1.0, 2.0), (3.0, 4.0)), rhs=(5.0, 6.0)),
        algorithm="rhombus",
        params=IterationParams(l_initial=20.0, c=2.0, n_iter=30),
        sweep=(1.5, 2.0),
        output_dir=out_dir,
        timing=False,
    )


class ConvergenceReportTests(unittest.TestCase):
    def test_json_report(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            run_dir = Path(temp_dir)
            run_experiment(example_rhombus_sweep(run_dir))
            output = io.StringIO()
            with redirect_stdout(output):
                code = convergence_report.main([str(run_dir), "--threshold", "1e-6"])
            self.assertEqual(code, 0)
            payload = json.loads(output.getvalue().split("\n", 1)[1])
            self.assertEqual([run["name"] for run in payload], ["example_rhombus_c1.5", "example_rhombus_c2"])
            for run in payload:
                self.assertEqual(run["status"], "ok")
                self.assertEqual(run["iters"], 30)
                self.assertIsNotNone(run["crossing_iter"])
                self.assertLess(run["log10_slope"], 0)

    def test_human_table_shows_failed_runs(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            run_dir = Path(temp_dir)
            (run_dir / "summary.txt").write_text(
                "name=broken final_f=nan iters=0 status=error:block 2: solver failed\n", encoding="utf-8"
            )
            output = io.StringIO()
            with redirect_stdout(output):
                code = convergence_report.main([str(run_dir), "--human"])
            self.assertEqual(code, 0)
            text = output.getvalue()
            self.assertIn("broken", text)
            self.assertIn("status: error:block 2: solver failed", text)

    def test_missing_summary(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            errors = io.StringIO()
            with redirect_stderr(errors):
                code = convergence_report.main([temp_dir])
            self.assertEqual(code, 1)
            self.assertIn("[ERROR]", errors.getvalue())


if __name__ == "__main__":
    unittest.main()
