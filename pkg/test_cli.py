import contextlib
import io
import tempfile
import unittest
from pathlib import Path

from app.cli.commands import cli_main, x_path_for
from app.core.experiments.report_files import parse_summary_line, read_convergence_csv
from app.core.linalg.text_format import read_matrix, read_vector, write_matrix, write_vector


def run_cli(*argv) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli_main([str(arg) for arg in argv])
    return code, out.getvalue(), err.getvalue()


class CliTests(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def generate(self, n: int, seed: int = 7) -> tuple[Path, Path]:
        matrix, rhs = self.dir / f"A{n}.txt", self.dir / f"b{n}.txt"
        code, _, _ = run_cli("gen", "--n", n, "--lo", 0, "--hi", 200, "--seed", seed, "--out-matrix", matrix, "--out-rhs", rhs)
        self.assertEqual(code, 0)
        return matrix, rhs

    def test_gen_writes_the_text_format(self):
        matrix, rhs = self.generate(5)
        a, b = read_matrix(matrix), read_vector(rhs)
        self.assertEqual(a.shape, (5, 5))
        self.assertEqual(b.shape, (5,))
        self.assertTrue(((a >= 0) & (a < 200)).all())
        self.assertTrue(matrix.read_text(encoding="utf-8").startswith("5 5\n"))

    def test_solve_rhombus_writes_one_row_per_iteration(self):
        matrix, rhs = self.generate(20)
        out = self.dir / "run.csv"
        code, stdout, _ = run_cli(
            "solve", "--matrix", matrix, "--rhs", rhs, "--algo", "rhombus", "--L", 100, "--c", 2, "--iters", 60, "--out", out
        )
        self.assertEqual(code, 0)
        rows = read_convergence_csv(out)
        self.assertEqual(len(rows), 60)
        self.assertEqual(rows[0].l, 100.0)
        self.assertTrue(x_path_for(out).exists())
        self.assertIn("iters=60", stdout)

    def test_solve_block_then_check(self):
        matrix, rhs = self.generate(12)
        out = self.dir / "block.csv"
        code, stdout, _ = run_cli(
            "solve", "--matrix", matrix, "--rhs", rhs, "--algo", "block", "--blocks", "4,4,4", "--solver", "sa",
            "--sweeps", 50, "--R", 2, "--c", 1.5, "--iters", 20, "--seed", 3, "--out", out,
        )
        self.assertEqual(code, 0)
        printed = float(stdout.split("final_f=")[1].split()[0])
        self.assertEqual(printed, read_convergence_csv(out)[-1].f_value)
        code, stdout, _ = run_cli("check", "--report", out, "--matrix", matrix, "--rhs", rhs)
        self.assertEqual(code, 0)
        self.assertTrue(stdout.startswith("[OK]"))

    def test_check_detects_a_tampered_iterate(self):
        matrix, rhs = self.generate(6)
        out = self.dir / "run.csv"
        run_cli("solve", "--matrix", matrix, "--rhs", rhs, "--iters", 10, "--out", out)
        x = read_vector(x_path_for(out))
        write_vector(x_path_for(out), x + 1.0)
        code, _, stderr = run_cli("check", "--report", out, "--matrix", matrix, "--rhs", rhs)
        self.assertEqual(code, 1)
        self.assertIn("mismatch", stderr)

    def test_progress_lines(self):
        matrix, rhs = self.generate(4)
        code, stdout, _ = run_cli(
            "solve", "--matrix", matrix, "--rhs", rhs, "--iters", 3, "--progress", "--out", self.dir / "p.csv"
        )
        self.assertEqual(code, 0)
        self.assertEqual(sum(line.startswith("iter=") for line in stdout.splitlines()), 3)

    def test_version(self):
        code, stdout, _ = run_cli("--version")
        self.assertEqual(code, 0)
        self.assertTrue(stdout.startswith("qubolin "))

    def test_unknown_flag(self):
        code, _, stderr = run_cli("solve", "--bogus", "--out", self.dir / "x.csv")
        self.assertEqual(code, 2)
        self.assertIn("--bogus", stderr)

    def test_bad_number(self):
        code, _, stderr = run_cli("solve", "--c", "fast", "--out", self.dir / "x.csv")
        self.assertEqual(code, 2)
        self.assertIn("fast", stderr)

    def test_invalid_setting_value(self):
        matrix, rhs = self.generate(3)
        code, _, stderr = run_cli("solve", "--matrix", matrix, "--rhs", rhs, "--c", 0.5, "--out", self.dir / "x.csv")
        self.assertEqual(code, 2)
        self.assertIn("shrink factor", stderr)

    def test_missing_matrix_file(self):
        code, _, _ = run_cli("solve", "--matrix", self.dir / "nope.txt", "--rhs", self.dir / "nope.txt", "--out", self.dir / "x.csv")
        self.assertEqual(code, 1)

    def test_basis(self):
        matrix = self.dir / "A.txt"
        write_matrix(matrix, [[1.0, 2.0], [3.0, 4.0]])
        code, _, _ = run_cli("basis", "--matrix", matrix, "--out-dir", self.dir / "full")
        self.assertEqual(code, 0)
        self.assertAlmostEqual(read_matrix(self.dir / "full" / "V.txt")[1, 0], -1.4 / (1.4**2 + 1) ** 0.5)
        self.assertEqual(read_vector(self.dir / "full" / "C.txt")[0], 10.0)

    def test_block_basis(self):
        matrix, _ = self.generate(6)
        code, stdout, _ = run_cli("basis", "--matrix", matrix, "--blocks", "uniform:4", "--out-dir", self.dir / "blocks")
        self.assertEqual(code, 0)
        self.assertIn("composition=4,2", stdout)
        self.assertEqual(read_matrix(self.dir / "blocks" / "H_1.txt").shape, (2, 2))

    def test_experiment_recipe(self):
        code, stdout, _ = run_cli("experiment", "--recipe", "small-square-sweep", "--no-timing", "--out-dir", self.dir / "runs")
        self.assertEqual(code, 0)
        parsed = [parse_summary_line(line) for line in stdout.splitlines()]
        self.assertEqual([p["name"] for p in parsed], ["small-square-sweep_square_c1.2", "small-square-sweep_square_c1.5"])
        self.assertTrue(all(p["status"] == "ok" and p["iters"] == 150 for p in parsed))
        self.assertTrue((self.dir / "runs" / "summary.json").exists())

    def test_unknown_recipe(self):
        code, _, stderr = run_cli("experiment", "--recipe", "nope", "--out-dir", self.dir / "runs")
        self.assertEqual(code, 2)
        self.assertIn("nope", stderr)

    def test_list_recipes(self):
        code, stdout, _ = run_cli("experiment", "--list-recipes")
        self.assertEqual(code, 0)
        self.assertIn("block-n100:", stdout)

    def test_config_file_is_overridden_by_flags(self):
        matrix, rhs = self.generate(4)
        settings = self.dir / "settings.conf"
        settings.write_text("# shared settings\nc = 1.5\niters = 7\nL = 10\n", encoding="utf-8")
        out = self.dir / "cfg.csv"
        code, _, _ = run_cli("solve", "--config", settings, "--matrix", matrix, "--rhs", rhs, "--iters", 5, "--out", out)
        self.assertEqual(code, 0)
        rows = read_convergence_csv(out)
        self.assertEqual(len(rows), 5)
        self.assertEqual(rows[1].l, 10.0 / 1.5)

    def test_gen_reads_its_settings_from_the_config_file(self):
        matrix, rhs = self.dir / "A.txt", self.dir / "b.txt"
        settings = self.dir / "gen.conf"
        settings.write_text(
            f"n = 6\nlo = -1\nhi = 1\ninstance_seed = 3\nout_matrix = {matrix}\nout_rhs = {rhs}\n", encoding="utf-8"
        )
        code, _, _ = run_cli("gen", "--config", settings, "--n", 4)
        self.assertEqual(code, 0)
        a = read_matrix(matrix)
        self.assertEqual(a.shape, (4, 4))
        self.assertTrue(((a >= -1) & (a < 1)).all())

        again_matrix, again_rhs = self.dir / "A2.txt", self.dir / "b2.txt"
        code, _, _ = run_cli(
            "gen", "--n", 4, "--lo", -1, "--hi", 1, "--seed", 3, "--out-matrix", again_matrix, "--out-rhs", again_rhs
        )
        self.assertEqual(code, 0)
        self.assertEqual(again_matrix.read_text(encoding="utf-8"), matrix.read_text(encoding="utf-8"))
        self.assertEqual(again_rhs.read_text(encoding="utf-8"), rhs.read_text(encoding="utf-8"))

    def test_gen_without_output_paths(self):
        code, _, stderr = run_cli("gen", "--n", 3, "--seed", 1)
        self.assertEqual(code, 2)
        self.assertIn("out_matrix", stderr)

    def test_malformed_config_file(self):
        settings = self.dir / "bad.conf"
        settings.write_text("just words\n", encoding="utf-8")
        code, _, stderr = run_cli("solve", "--config", settings, "--out", self.dir / "x.csv")
        self.assertEqual(code, 2)
        self.assertIn("key=value", stderr)


if __name__ == "__main__":
    unittest.main()
