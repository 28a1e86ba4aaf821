"""
SettingsLogic: typed views over the layered configuration.

Precedence, highest first: explicit overrides (command-line flags), the
selected recipe, the user key=value file, QUBOLIN_* environment variables,
the bundled defaults.
"""

from pathlib import Path

from ...models.experiment.experiment_config import Algorithm, ExperimentConfig, GeneratorSpec, InstanceSource
from ...models.report.solve_report import IterationParams
from ...models.solver.solver_spec import AnnealingParams, SolverSpec, TabuParams
from ..errors import ConfigError
from ..linalg.text_format import read_vector
from .config_manager import ConfigManager, normalize_key

TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}
NONE_WORDS = {"", "none", "null", "auto"}


def parse_blocks(value) -> tuple[tuple[int, ...] | None, int | None]:
    """``10,10,5`` or a list gives an explicit composition; ``uniform:K`` a block size."""
    if value is None:
        return None, None
    if isinstance(value, (list, tuple)):
        return tuple(int(a) for a in value), None
    text = str(value).strip()
    try:
        if text.lower().startswith("uniform:"):
            return None, int(text.split(":", 1)[1])
        return tuple(int(token) for token in text.split(",") if token.strip()), None
    except ValueError:
        raise ConfigError(f"invalid block specification: {value!r}") from None


def parse_float_list(value) -> tuple[float, ...]:
    if value is None:
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    try:
        return tuple(float(token) for token in str(value).split(",") if token.strip())
    except ValueError:
        raise ConfigError(f"invalid list of numbers: {value!r}") from None


class SettingsLogic:
    def __init__(self, config_manager: ConfigManager, overrides: dict | None = None, recipe: dict | None = None):
        self.config_manager = config_manager
        self.overrides = {normalize_key(k): v for k, v in (overrides or {}).items() if v is not None}
        self.recipe = {normalize_key(k): v for k, v in (recipe or {}).items()}

    def get_config_value(self, key, default=None):
        key = normalize_key(key)
        if key in self.overrides:
            return self.overrides[key]
        if key in self.recipe:
            return self.recipe[key]
        return self.config_manager.get_config_value(key, default)

    def _convert(self, key, cast, optional=False):
        value = self.get_config_value(key)
        if isinstance(value, str) and value.strip().lower() in NONE_WORDS:
            value = None
        if value is None:
            if optional:
                return None
            raise ConfigError(f"missing setting: {key}")
        try:
            return cast(value)
        except (TypeError, ValueError):
            raise ConfigError(f"invalid value for {key}: {value!r}") from None

    def get_int(self, key) -> int:
        return self._convert(key, int)

    def get_float(self, key) -> float:
        return self._convert(key, float)

    def get_optional_float(self, key) -> float | None:
        return self._convert(key, float, optional=True)

    def get_str(self, key) -> str:
        return self._convert(key, str)

    def get_bool(self, key) -> bool:
        value = self.get_config_value(key)
        if isinstance(value, bool):
            return value
        word = str(value).strip().lower()
        if word in TRUE_WORDS:
            return True
        if word in FALSE_WORDS:
            return False
        raise ConfigError(f"invalid value for {key}: {value!r}")

    def build_solver_spec(self) -> SolverSpec:
        return SolverSpec(
            kind=self.get_str("solver"),
            seed=self.get_int("seed"),
            annealing=AnnealingParams(
                sweeps=self.get_int("sweeps"),
                restarts=self.get_int("sa_restarts"),
                beta_initial=self.get_optional_float("beta_initial"),
                beta_final=self.get_optional_float("beta_final"),
            ),
            tabu=TabuParams(
                tenure=self.get_int("tenure"),
                max_moves=self.get_int("max_moves"),
                restarts=self.get_int("tabu_restarts"),
            ),
        )

    def get_l_initial(self) -> float | None:
        return self.get_optional_float("l")

    def build_iteration_params(self, l_initial: float | None = None) -> IterationParams:
        if l_initial is None:
            l_initial = self.get_l_initial()
        return IterationParams(
            l_initial=1.0 if l_initial is None else l_initial,
            c=self.get_float("c"),
            n_iter=self.get_int("iters"),
            r_bits=self.get_int("r_bits"),
            early_stop_f=self.get_optional_float("early_stop_f"),
            snapshots=self.get_str("snapshots"),
            track_containment=self.get_bool("track_containment"),
            debug_checks=self.get_bool("debug_checks"),
        )

    def build_instance_source(self) -> InstanceSource:
        matrix_path = self.get_config_value("matrix")
        rhs_path = self.get_config_value("rhs")
        if isinstance(matrix_path, list) or isinstance(rhs_path, list):
            return InstanceSource(
                matrix=tuple(tuple(float(v) for v in row) for row in matrix_path),
                rhs=tuple(float(v) for v in rhs_path),
            )
        if matrix_path is not None or rhs_path is not None:
            return InstanceSource(
                matrix_path=Path(matrix_path) if matrix_path is not None else None,
                rhs_path=Path(rhs_path) if rhs_path is not None else None,
            )
        return InstanceSource(generator=self.build_generator_spec())

    def build_generator_spec(self) -> GeneratorSpec:
        return GeneratorSpec(
            n=self.get_int("n"),
            lo=self.get_float("lo"),
            hi=self.get_float("hi"),
            seed=self.get_int("instance_seed"),
        )

    def build_experiment_config(self, name: str, output_dir) -> ExperimentConfig:
        algorithm = Algorithm.parse(self.get_str("algo"))
        composition, block_size = parse_blocks(self.get_config_value("blocks"))
        if algorithm is not Algorithm.BLOCK:
            composition, block_size = None, None
        elif composition is None and block_size is None:
            raise ConfigError("the block algorithm needs --blocks (a list or uniform:K)")
        l_initial = self.get_l_initial()
        x0_path = self.get_config_value("x0")
        return ExperimentConfig(
            name=name,
            source=self.build_instance_source(),
            algorithm=algorithm,
            params=self.build_iteration_params(l_initial),
            solver=self.build_solver_spec(),
            composition=composition,
            block_size=block_size,
            sweep=parse_float_list(self.get_config_value("sweep")),
            auto_l=l_initial is None,
            x0=tuple(read_vector(x0_path)) if x0_path is not None else None,
            shift=self.get_float("shift"),
            jobs=self.get_int("jobs"),
            block_jobs=self.get_int("block_jobs"),
            output_dir=Path(output_dir),
            timing=self.get_bool("timing"),
            svg=self.get_bool("svg"),
        )
