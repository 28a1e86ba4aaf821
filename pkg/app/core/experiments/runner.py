from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ...event_bus import EventBus
from ...models.experiment.experiment_config import Algorithm, ExperimentConfig, InstanceSource
from ...models.linear.linear_system import LinearSystem
from ...models.report.solve_report import IterationParams, SolveReport
from ...models.solver.solver_spec import SolverSpec
from ...utils.logger import logger
from ..drivers import solve_block, solve_rhombus, solve_square, uniform_composition
from ..errors import ConfigError, QuboLinError
from ..geometry.basis_cache import cached_conjugate_basis
from ..geometry.h_geometry import suggest_l
from ..linalg.linsys import random_instance
from ..linalg.text_format import read_matrix, read_vector
from .report_files import summary_line, write_convergence_csv, write_convergence_svg, write_summary


@dataclass
class RunResult:
    name: str
    c: float
    status: str = "ok"
    report: SolveReport | None = None
    csv_path: Path | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def final_f(self) -> float | None:
        return self.report.final_f if self.report is not None else None

    @property
    def iterations(self) -> int:
        return self.report.iterations if self.report is not None else 0


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list[RunResult] = field(default_factory=list)
    summary_path: Path | None = None
    summary_json_path: Path | None = None
    svg_path: Path | None = None

    @property
    def exit_status(self) -> int:
        return 0 if all(run.ok for run in self.runs) else 1

    @property
    def files(self) -> list[Path]:
        paths = [run.csv_path for run in self.runs if run.csv_path is not None]
        paths += [p for p in (self.summary_path, self.summary_json_path, self.svg_path) if p is not None]
        return paths


def load_instance(source: InstanceSource) -> LinearSystem:
    if source.generator is not None:
        g = source.generator
        return random_instance(g.n, g.lo, g.hi, g.seed)
    if source.matrix_path is not None:
        return LinearSystem(read_matrix(source.matrix_path), read_vector(source.rhs_path))
    return LinearSystem(np.array(source.matrix, dtype=np.float64), np.array(source.rhs, dtype=np.float64))


def resolve_composition(cfg: ExperimentConfig, n: int) -> tuple[int, ...] | None:
    if cfg.algorithm is not Algorithm.BLOCK:
        return None
    if cfg.composition is not None:
        if sum(cfg.composition) != n:
            raise ConfigError(f"composition {cfg.composition} does not sum to N={n}")
        return cfg.composition
    return uniform_composition(n, cfg.block_size)


def run_single(
    system: LinearSystem,
    x0: np.ndarray,
    algorithm: Algorithm,
    params: IterationParams,
    solver: SolverSpec,
    composition: tuple[int, ...] | None = None,
    shift: float = 1.0,
    block_jobs: int = 1,
    bus: EventBus | None = None,
    name: str | None = None,
    timing: bool = True,
) -> SolveReport:
    """Dispatch one solve to the driver of *algorithm*."""
    algorithm = Algorithm.parse(algorithm)
    if algorithm is Algorithm.SQUARE:
        return solve_square(system, x0, params, solver, shift=shift, bus=bus, name=name, timing=timing)
    if algorithm is Algorithm.RHOMBUS:
        return solve_rhombus(system, x0, params, bus=bus, name=name, timing=timing)
    return solve_block(
        system, x0, params, composition, solver, jobs=block_jobs, bus=bus, name=name, timing=timing
    )


def initial_edge_length(cfg: ExperimentConfig, system: LinearSystem, x0: np.ndarray) -> float:
    if not cfg.auto_l:
        return cfg.params.l_initial
    l_initial = suggest_l(system, x0, basis=cached_conjugate_basis(system.a))
    logger.info(f"{cfg.name}: suggested initial edge length L={l_initial:.6g}")
    return l_initial


def run_experiment(cfg: ExperimentConfig, bus: EventBus | None = None) -> ExperimentResult:
    """Run every sweep point of *cfg*; failures are recorded per run and never abort siblings."""
    started = datetime.now(timezone.utc)
    result = ExperimentResult(config=cfg)
    out_dir = cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        system = load_instance(cfg.source)
        x0 = np.zeros(system.n) if cfg.x0 is None else np.asarray(cfg.x0, dtype=np.float64)
        composition = resolve_composition(cfg, system.n)
        l_initial = initial_edge_length(cfg, system, x0)
    except QuboLinError as e:
        logger.error(f"{cfg.name}: cannot prepare experiment: {e}")
        result.runs = [RunResult(name=cfg.run_name(c), c=c, status=f"error:{e}") for c in cfg.c_values]
        _finish(result, started)
        return result

    def run_point(c: float) -> RunResult:
        name = cfg.run_name(c)
        run = RunResult(name=name, c=c)
        try:
            params = replace(cfg.params, c=c, l_initial=l_initial)
            report = run_single(
                system, x0, cfg.algorithm, params, cfg.solver,
                composition=composition, shift=cfg.shift, block_jobs=cfg.block_jobs,
                bus=bus, name=name, timing=cfg.timing,
            )
            run.report = report
            run.csv_path = write_convergence_csv(out_dir / f"{name}.csv", report, timing=cfg.timing)
        except Exception as e:
            run.status = f"error:{e}"
            logger.error(f"{name}: run failed: {e}")
        return run

    if cfg.jobs > 1 and len(cfg.c_values) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            result.runs = list(pool.map(run_point, cfg.c_values))
    else:
        result.runs = [run_point(c) for c in cfg.c_values]

    if cfg.svg:
        traces = {run.name: run.report.f_trace for run in result.runs if run.report is not None}
        result.svg_path = write_convergence_svg(out_dir / f"{cfg.name}.svg", traces)
    _finish(result, started)
    return result


def _finish(result: ExperimentResult, started: datetime) -> None:
    cfg = result.config
    lines = [summary_line(run.name, run.final_f, run.iterations, run.status) for run in result.runs]
    payload = {
        "experiment": cfg.to_dict(),
        "started": started.isoformat(),
        "finished": datetime.now(timezone.utc).isoformat(),
        "runs": [
            {
                "name": run.name,
                "c": run.c,
                "status": run.status,
                "final_f": run.final_f,
                "initial_f": run.report.initial_f if run.report else None,
                "iters": run.iterations,
                "stop_reason": run.report.stop_reason if run.report else None,
                "regressions": run.report.regressions if run.report else None,
                "csv": run.csv_path.name if run.csv_path else None,
            }
            for run in result.runs
        ],
    }
    result.summary_path, result.summary_json_path = write_summary(cfg.output_dir, lines, payload)
    failed = sum(1 for run in result.runs if not run.ok)
    logger.info(f"{cfg.name}: {len(result.runs) - failed}/{len(result.runs)} runs completed")
