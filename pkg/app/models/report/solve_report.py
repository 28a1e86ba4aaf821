from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ...core.errors import ConfigError


class SnapshotPolicy(Enum):
    FINAL = "final"
    FIRST_LAST = "first-last"
    ALL = "all"

    @classmethod
    def parse(cls, value) -> "SnapshotPolicy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"Unsupported snapshot policy: {value}") from None


class StopReason:
    ITERATIONS = "iterations"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class IterationParams:
    l_initial: float
    c: float
    n_iter: int
    r_bits: int = 1
    early_stop_f: float | None = None
    snapshots: SnapshotPolicy = SnapshotPolicy.FINAL
    track_containment: bool = False
    debug_checks: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.l_initial) and self.l_initial > 0):
            raise ConfigError(f"initial edge length must be positive, got {self.l_initial}")
        if not self.c > 1:
            raise ConfigError(f"shrink factor must exceed 1, got {self.c}")
        if int(self.n_iter) != self.n_iter or self.n_iter < 1:
            raise ConfigError(f"iteration count must be >= 1, got {self.n_iter}")
        if int(self.r_bits) != self.r_bits or self.r_bits < 1:
            raise ConfigError(f"bits per coordinate must be >= 1, got {self.r_bits}")
        if self.early_stop_f is not None and self.early_stop_f < 0:
            raise ConfigError(f"early stop threshold must be >= 0, got {self.early_stop_f}")
        object.__setattr__(self, "l_initial", float(self.l_initial))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "n_iter", int(self.n_iter))
        object.__setattr__(self, "r_bits", int(self.r_bits))
        object.__setattr__(self, "snapshots", SnapshotPolicy.parse(self.snapshots))


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    l: float
    f_value: float
    elapsed: float
    x: np.ndarray | None = None
    bits: np.ndarray | None = None
    regressed: bool = False
    # max_j |D_j| / L for the exact solution at the start of the next iteration
    containment: float | None = None


@dataclass
class SolveReport:
    algorithm: str
    initial_f: float
    records: list[IterationRecord] = field(default_factory=list)
    x_star: np.ndarray | None = None
    converged: bool = False
    stop_reason: str = StopReason.ITERATIONS
    metadata: dict = field(default_factory=dict)

    @property
    def final_f(self) -> float:
        return self.records[-1].f_value if self.records else self.initial_f

    @property
    def f_trace(self) -> list[float]:
        return [record.f_value for record in self.records]

    @property
    def l_sequence(self) -> list[float]:
        return [record.l for record in self.records]

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def regressions(self) -> int:
        return sum(1 for record in self.records if record.regressed)

    def iterates(self) -> list[np.ndarray]:
        return [record.x for record in self.records if record.x is not None]

    def first_crossing(self, threshold: float) -> int | None:
        """Iteration index at which f first drops to *threshold* or below."""
        for record in self.records:
            if record.f_value <= threshold:
                return record.iteration
        return None

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "initial_f": self.initial_f,
            "final_f": self.final_f,
            "iterations": self.iterations,
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "regressions": self.regressions,
            "metadata": self.metadata,
        }
