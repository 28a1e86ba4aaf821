"""Bookkeeping shared by the iterative drivers: seeds, records, logging and events."""

import time
from dataclasses import replace

import numpy as np

from ...event_bus import ITERATION, RUN_FINISHED, EventBus
from ...models.report.solve_report import IterationParams, IterationRecord, SnapshotPolicy, SolveReport, StopReason
from ...utils.logger import logger


def derive_seed(seed: int, iteration: int, block: int = 0) -> int:
    """Independent solver seed for one (iteration, block) of a run."""
    sequence = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(iteration), int(block)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


class Stopwatch:
    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self._start = 0.0

    def start(self) -> None:
        self._start = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self._start if self.enabled else 0.0


class IterationTracker:
    """Collects IterationRecords under the configured snapshot policy and stop rules."""

    def __init__(
        self,
        algorithm: str,
        params: IterationParams,
        initial_f: float,
        name: str | None = None,
        bus: EventBus | None = None,
        metadata: dict | None = None,
    ):
        self.params = params
        self.name = name or algorithm
        self.bus = bus
        self.report = SolveReport(algorithm=algorithm, initial_f=float(initial_f), metadata=dict(metadata or {}))
        self._containment_lost = False

    def record(
        self,
        iteration: int,
        l: float,
        f_value: float,
        elapsed: float,
        x: np.ndarray,
        bits: np.ndarray,
        containment: float | None = None,
    ) -> bool:
        """Append one iteration; returns True when the early-stop threshold is reached."""
        records = self.report.records
        previous_f = records[-1].f_value if records else self.report.initial_f
        regressed = f_value > previous_f
        if regressed:
            logger.warning(f"{self.name}: f rose from {previous_f:.6e} to {f_value:.6e} at iteration {iteration}")
        if containment is not None and containment > 1.0 and not self._containment_lost:
            self._containment_lost = True
            logger.warning(f"{self.name}: solution left the search rhombus at iteration {iteration} (ratio {containment:.4g})")

        policy = self.params.snapshots
        if records and policy is not SnapshotPolicy.ALL:
            last = records[-1]
            keep_first = policy is SnapshotPolicy.FIRST_LAST and last.iteration == 0
            if not keep_first and last.x is not None:
                records[-1] = replace(last, x=None, bits=None)

        record = IterationRecord(
            iteration=iteration,
            l=float(l),
            f_value=float(f_value),
            elapsed=float(elapsed),
            x=np.array(x),
            bits=np.array(bits),
            regressed=regressed,
            containment=containment,
        )
        records.append(record)
        logger.log("ITERATION", f"{self.name} iter={iteration} L={l:.6g} f={f_value:.6e}")
        if self.bus is not None:
            self.bus.publish(ITERATION, self.name, record)

        threshold = self.params.early_stop_f
        return threshold is not None and f_value <= threshold

    def finish(self, x_star: np.ndarray, stopped_early: bool) -> SolveReport:
        report = self.report
        report.x_star = np.array(x_star)
        report.stop_reason = StopReason.THRESHOLD if stopped_early else StopReason.ITERATIONS
        threshold = self.params.early_stop_f
        report.converged = threshold is not None and report.final_f <= threshold
        logger.info(
            f"{self.name}: {report.iterations} iterations, f {report.initial_f:.6e} -> {report.final_f:.6e} "
            f"({report.stop_reason})"
        )
        if self.bus is not None:
            self.bus.publish(RUN_FINISHED, self.name, report)
        return report
