from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from ...core.errors import ConfigError
from ..report.solve_report import IterationParams
from ..solver.solver_spec import SolverSpec


class Algorithm(Enum):
    SQUARE = "square"
    RHOMBUS = "rhombus"
    BLOCK = "block"

    @classmethod
    def parse(cls, value) -> "Algorithm":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"Unsupported algorithm: {value}") from None


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    lo: float = 0.0
    hi: float = 200.0
    seed: int = 7

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"generator size must be >= 1, got {self.n}")
        if not self.lo < self.hi:
            raise ConfigError(f"generator range must satisfy lo < hi, got [{self.lo}, {self.hi})")


@dataclass(frozen=True)
class InstanceSource:
    """Exactly one of: matrix/rhs files, inline values, or a generator."""

    matrix_path: Path | None = None
    rhs_path: Path | None = None
    matrix: tuple | None = None
    rhs: tuple | None = None
    generator: GeneratorSpec | None = None

    def __post_init__(self):
        kinds = [
            self.matrix_path is not None or self.rhs_path is not None,
            self.matrix is not None or self.rhs is not None,
            self.generator is not None,
        ]
        if sum(kinds) != 1:
            raise ConfigError("give exactly one instance source: matrix/rhs files, inline values or a generator")
        if kinds[0] and (self.matrix_path is None or self.rhs_path is None):
            raise ConfigError("both a matrix file and a right-hand-side file are required")
        if kinds[1] and (self.matrix is None or self.rhs is None):
            raise ConfigError("inline instances need both matrix and rhs")

    def describe(self) -> str:
        if self.generator is not None:
            g = self.generator
            return f"random n={g.n} [{g.lo:g}, {g.hi:g}) seed={g.seed}"
        if self.matrix_path is not None:
            return f"{self.matrix_path} / {self.rhs_path}"
        return f"inline n={len(self.rhs)}"


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    source: InstanceSource
    algorithm: Algorithm
    params: IterationParams
    solver: SolverSpec = field(default_factory=SolverSpec)
    composition: tuple[int, ...] | None = None
    # None: take the composition from the ``uniform:K`` block size once N is known
    block_size: int | None = None
    sweep: tuple[float, ...] = ()
    # params.l_initial is replaced by suggest_l once the instance is loaded
    auto_l: bool = False
    x0: tuple[float, ...] | None = None
    shift: float = 1.0
    jobs: int = 1
    block_jobs: int = 1
    output_dir: Path = Path("runs")
    timing: bool = True
    svg: bool = False

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm.parse(self.algorithm))
        object.__setattr__(self, "sweep", tuple(float(c) for c in self.sweep))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        has_blocks = self.composition is not None or self.block_size is not None
        if (self.algorithm is Algorithm.BLOCK) != has_blocks:
            raise ConfigError("a block composition is required for, and only for, the block algorithm")
        if self.composition is not None and self.block_size is not None:
            raise ConfigError("give either an explicit composition or a uniform block size, not both")
        if self.composition is not None:
            object.__setattr__(self, "composition", tuple(int(a) for a in self.composition))
            if any(a < 1 for a in self.composition):
                raise ConfigError(f"composition entries must be >= 1, got {self.composition}")
        bad = [c for c in self.sweep if not c > 1]
        if bad:
            raise ConfigError(f"sweep values must exceed 1, got {bad}")
        if self.jobs < 1 or self.block_jobs < 1:
            raise ConfigError("job counts must be >= 1")
        if self.shift not in (0.5, 1.0):
            raise ConfigError(f"shift must be 1 (literal box) or 0.5 (centred box), got {self.shift}")
        if self.x0 is not None and not np.all(np.isfinite(self.x0)):
            raise ConfigError("x0 contains non-finite entries")

    @property
    def c_values(self) -> tuple[float, ...]:
        return self.sweep if self.sweep else (self.params.c,)

    def run_name(self, c: float) -> str:
        return f"{self.name}_{self.algorithm.value}_c{c:g}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "source": self.source.describe(),
            "algorithm": self.algorithm.value,
            "l_initial": None if self.auto_l else self.params.l_initial,
            "c_values": list(self.c_values),
            "n_iter": self.params.n_iter,
            "r_bits": self.params.r_bits,
            "composition": list(self.composition) if self.composition else None,
            "block_size": self.block_size,
            "solver": self.solver.to_dict(),
            "shift": self.shift,
        }
