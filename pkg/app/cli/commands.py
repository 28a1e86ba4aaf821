"""Command-line front end: gen, solve, basis, experiment and check."""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .. import bundle_dir, execute_dir
from ..core.config.config_manager import ConfigManager
from ..core.config.settings_logic import SettingsLogic, parse_blocks
from ..core.drivers import uniform_composition
from ..core.errors import ConfigError, QuboLinError
from ..core.experiments.report_files import read_convergence_csv, write_convergence_csv, write_convergence_svg
from ..core.experiments.runner import (
    initial_edge_length,
    load_instance,
    resolve_composition,
    run_experiment,
    run_single,
)
from ..core.geometry.h_geometry import block_conjugate_basis, conjugate_basis
from ..core.linalg.linsys import random_instance, residual_norm_sq
from ..core.linalg.text_format import format_real, read_matrix, read_vector, write_matrix, write_vector
from ..event_bus import ITERATION, EventBus
from ..models.linear.linear_system import LinearSystem
from ..utils.logger import logger

CHECK_TOLERANCE = 1e-9


def x_path_for(csv_path: str | Path) -> Path:
    """Where ``solve`` stores the final iterate next to its CSV: run.csv -> run.x.txt."""
    csv_path = Path(csv_path)
    return csv_path.with_name(f"{csv_path.stem}.x.txt")


def _add_instance_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("instance")
    group.add_argument("--matrix", help="Matrix file (R C header, one row per line).")
    group.add_argument("--rhs", help="Right-hand-side vector file.")
    group.add_argument("--n", type=int, help="Generate a random instance of this size instead of reading files.")
    group.add_argument("--lo", type=float, help="Lower bound of generated entries.")
    group.add_argument("--hi", type=float, help="Upper bound (exclusive) of generated entries.")
    group.add_argument("--instance-seed", dest="instance_seed", type=int, help="Seed of the generated instance.")
    group.add_argument("--x0", help="Initial guess vector file (default: zeros).")


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    run = parser.add_argument_group("iteration")
    run.add_argument("--algo", choices=("square", "rhombus", "block"), help="Driver to run.")
    run.add_argument("--L", dest="l", type=float, help="Initial edge length (default: suggested from the instance).")
    run.add_argument("--c", type=float, help="Shrink factor, > 1.")
    run.add_argument("--iters", type=int, help="Number of iterations.")
    run.add_argument("--R", dest="r_bits", type=int, help="Bits per coordinate.")
    run.add_argument("--shift", type=float, choices=(0.5, 1.0), help="Square box offset: 1 literal, 0.5 centred.")
    run.add_argument("--early-stop", dest="early_stop_f", type=float, help="Stop once f drops to this value.")
    run.add_argument("--snapshots", choices=("final", "first-last", "all"), help="Which iterates to keep.")
    run.add_argument("--track-containment", dest="track_containment", action="store_const", const=True,
                     help="Record max|D_j|/L of the exact solution (rhombus).")
    run.add_argument("--debug-checks", dest="debug_checks", action="store_const", const=True,
                     help="Verify that the rhombus QUBO is diagonal at every iteration.")
    run.add_argument("--blocks", help="Block composition: comma list or uniform:K.")
    run.add_argument("--block-jobs", dest="block_jobs", type=int, help="Threads for the block sub-solves.")
    run.add_argument("--jobs", type=int, help="Threads for independent sweep points.")
    run.add_argument("--no-timing", dest="timing", action="store_const", const=False,
                     help="Write elapsed_ms as 0 so reruns give identical CSVs.")
    run.add_argument("--svg", action="store_const", const=True, help="Also write a log10 f chart.")

    solver = parser.add_argument_group("solver")
    solver.add_argument("--solver", choices=("exhaustive", "sa", "simulated-annealing", "tabu"), help="QUBO solver.")
    solver.add_argument("--seed", type=int, help="Solver seed.")
    solver.add_argument("--sweeps", type=int, help="Annealing sweeps.")
    solver.add_argument("--sa-restarts", dest="sa_restarts", type=int, help="Annealing restarts.")
    solver.add_argument("--beta-initial", dest="beta_initial", type=float, help="Initial inverse temperature.")
    solver.add_argument("--beta-final", dest="beta_final", type=float, help="Final inverse temperature.")
    solver.add_argument("--tenure", type=int, help="Tabu tenure.")
    solver.add_argument("--max-moves", dest="max_moves", type=int, help="Tabu moves per restart.")
    solver.add_argument("--tabu-restarts", dest="tabu_restarts", type=int, help="Tabu restarts.")


def build_parser(version: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubolin", description="Solve A·x = b by iterated QUBO problems.")
    parser.add_argument("--version", action="version", version=f"qubolin {version}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value settings file; command-line flags take precedence.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen = subparsers.add_parser("gen", parents=[common], help="Generate a seeded random instance.")
    gen.add_argument("--n", type=int, help="Size of the system.")
    gen.add_argument("--lo", type=float, help="Lower bound of the entries.")
    gen.add_argument("--hi", type=float, help="Upper bound (exclusive) of the entries.")
    gen.add_argument("--seed", dest="instance_seed", type=int, help="Instance seed.")
    gen.add_argument("--out-matrix", dest="out_matrix", help="Matrix file to write.")
    gen.add_argument("--out-rhs", dest="out_rhs", help="Right-hand-side file to write.")

    solve = subparsers.add_parser("solve", parents=[common], help="Run one driver and write its convergence CSV.")
    _add_instance_arguments(solve)
    _add_run_arguments(solve)
    solve.add_argument("--out", required=True, help="CSV path; the final x goes to <stem>.x.txt.")
    solve.add_argument("--progress", action="store_true", help="Print one line per iteration.")

    basis = subparsers.add_parser("basis", parents=[common], help="Write the H-orthogonal (block) basis of A.")
    basis.add_argument("--matrix", required=True)
    basis.add_argument("--blocks", help="Block composition: comma list or uniform:K (default: fully conjugate).")
    basis.add_argument("--out-dir", dest="out_dir", required=True)

    experiment = subparsers.add_parser("experiment", parents=[common], help="Run a sweep or a named recipe.")
    _add_instance_arguments(experiment)
    _add_run_arguments(experiment)
    experiment.add_argument("--recipe", help="Named preset from config/recipes.json.")
    experiment.add_argument("--list-recipes", dest="list_recipes", action="store_true")
    experiment.add_argument("--sweep", help="Comma-separated shrink factors, one run each.")
    experiment.add_argument("--name", help="Experiment name (default: the recipe name or 'run').")
    experiment.add_argument("--out-dir", dest="out_dir", default="runs")

    check = subparsers.add_parser("check", parents=[common], help="Replay the final iterate of a solve run.")
    check.add_argument("--report", required=True, help="CSV written by solve.")
    check.add_argument("--matrix", required=True)
    check.add_argument("--rhs", required=True)
    check.add_argument("--x", help="Final iterate file (default: <report stem>.x.txt).")
    return parser


SETTING_KEYS = (
    "matrix", "rhs", "n", "lo", "hi", "instance_seed", "x0", "algo", "l", "c", "iters", "r_bits", "shift",
    "early_stop_f", "snapshots", "track_containment", "debug_checks", "blocks", "block_jobs", "jobs", "timing",
    "svg", "solver", "seed", "sweeps", "sa_restarts", "beta_initial", "beta_final", "tenure", "max_moves",
    "tabu_restarts", "sweep",
)


def _settings(args, config_manager: ConfigManager, recipe: dict | None = None) -> SettingsLogic:
    overrides = {key: getattr(args, key, None) for key in SETTING_KEYS}
    return SettingsLogic(config_manager, overrides=overrides, recipe=recipe)


GEN_KEYS = ("n", "lo", "hi", "instance_seed", "out_matrix", "out_rhs")


def cmd_gen(args, config_manager: ConfigManager) -> int:
    settings = SettingsLogic(config_manager, overrides={key: getattr(args, key) for key in GEN_KEYS})
    spec = settings.build_generator_spec()
    out_matrix, out_rhs = settings.get_str("out_matrix"), settings.get_str("out_rhs")
    system = random_instance(spec.n, spec.lo, spec.hi, spec.seed)
    write_matrix(out_matrix, system.a)
    write_vector(out_rhs, system.b)
    print(f"wrote {out_matrix} and {out_rhs} (n={system.n})")
    return 0


def cmd_solve(args, config_manager: ConfigManager) -> int:
    settings = _settings(args, config_manager)
    cfg = settings.build_experiment_config(name=Path(args.out).stem, output_dir=Path(args.out).parent)
    system = load_instance(cfg.source)
    x0 = np.zeros(system.n) if cfg.x0 is None else np.asarray(cfg.x0, dtype=np.float64)
    composition = resolve_composition(cfg, system.n)
    params = replace(cfg.params, l_initial=initial_edge_length(cfg, system, x0))

    bus = EventBus()
    if args.progress:
        bus.subscribe(ITERATION, lambda topic, name, record: print(
            f"iter={record.iteration} L={format_real(record.l)} f={format_real(record.f_value)}"
        ))
    report = run_single(
        system, x0, cfg.algorithm, params, cfg.solver,
        composition=composition, shift=cfg.shift, block_jobs=cfg.block_jobs,
        bus=bus, name=cfg.name, timing=cfg.timing,
    )
    csv_path = write_convergence_csv(args.out, report, timing=cfg.timing)
    write_vector(x_path_for(csv_path), report.x_star)
    if cfg.svg:
        write_convergence_svg(csv_path.with_suffix(".svg"), {cfg.name: report.f_trace})
    print(f"final_f={format_real(report.final_f)} iters={report.iterations} stop={report.stop_reason}")
    return 0


def cmd_basis(args, config_manager: ConfigManager) -> int:
    a = read_matrix(args.matrix)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    composition, block_size = parse_blocks(args.blocks)
    if composition is None and block_size is None:
        basis = conjugate_basis(a)
        write_matrix(out_dir / "V.txt", basis.v)
        write_vector(out_dir / "C.txt", basis.c)
        print(f"n={basis.n} composition=1x{basis.n} C_min={format_real(basis.c.min())} C_max={format_real(basis.c.max())}")
        return 0
    if composition is None:
        composition = uniform_composition(a.shape[0], block_size)
    basis = block_conjugate_basis(a, composition)
    write_matrix(out_dir / "V.txt", basis.v)
    for k, block in enumerate(basis.blocks):
        write_matrix(out_dir / f"H_{k}.txt", block)
    print(f"n={basis.n} composition={','.join(str(a) for a in basis.composition)}")
    return 0


def cmd_experiment(args, config_manager: ConfigManager) -> int:
    recipes = config_manager.load_recipes_config()
    if args.list_recipes:
        for name, recipe in recipes.items():
            print(f"{name}: {recipe.get('description', '')}")
        return 0
    recipe = None
    if args.recipe:
        if args.recipe not in recipes:
            raise ConfigError(f"Unknown recipe: {args.recipe}")
        recipe = {k: v for k, v in recipes[args.recipe].items() if k != "description"}
    settings = _settings(args, config_manager, recipe=recipe)
    name = args.name or args.recipe or "run"
    result = run_experiment(settings.build_experiment_config(name=name, output_dir=args.out_dir))
    for line in result.summary_path.read_text(encoding="utf-8").splitlines():
        print(line)
    return result.exit_status


def cmd_check(args, config_manager: ConfigManager) -> int:
    rows = read_convergence_csv(args.report)
    if not rows:
        print(f"[ERROR] {args.report} has no iterations", file=sys.stderr)
        return 1
    system = LinearSystem(read_matrix(args.matrix), read_vector(args.rhs))
    x = read_vector(args.x or x_path_for(args.report))
    replayed = residual_norm_sq(system, x)
    logged = rows[-1].f_value
    deviation = abs(replayed - logged)
    if deviation > CHECK_TOLERANCE * max(abs(logged), abs(replayed), np.finfo(np.float64).tiny):
        print(f"[ERROR] f mismatch: CSV {format_real(logged)} vs replayed {format_real(replayed)}", file=sys.stderr)
        return 1
    print(f"[OK] f={format_real(replayed)} matches iteration {rows[-1].iteration}")
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "basis": cmd_basis,
    "experiment": cmd_experiment,
    "check": cmd_check,
}


def cli_main(argv: list[str] | None = None) -> int:
    config_probe = ConfigManager(execute_dir, bundle_dir, load_env=False)
    parser = build_parser(config_probe.get_version())
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config_manager = ConfigManager(execute_dir, bundle_dir, user_config_path=args.config)
        return COMMANDS[args.command](args, config_manager)
    except ConfigError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return 2
    except (QuboLinError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"[ERROR] {e}", file=sys.stderr)
        return 1
