"""Files produced by solve runs: convergence CSVs, run summaries and the optional SVG chart."""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ...models.report.solve_report import SolveReport
from ...utils.logger import logger
from ..errors import DimensionError
from ..linalg.text_format import format_real

CSV_HEADER = ("iter", "L", "f", "elapsed_ms")


@dataclass(frozen=True)
class CsvRow:
    iteration: int
    l: float
    f_value: float
    elapsed_ms: float


def write_convergence_csv(path: str | Path, report: SolveReport, timing: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n", quoting=csv.QUOTE_NONE)
        writer.writerow(CSV_HEADER)
        for record in report.records:
            elapsed = f"{record.elapsed * 1000.0:.3f}" if timing else "0"
            writer.writerow((record.iteration, format_real(record.l), format_real(record.f_value), elapsed))
    return path


def read_convergence_csv(path: str | Path) -> list[CsvRow]:
    with open(path, encoding="utf-8", newline="") as file:
        reader = csv.reader(file)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise DimensionError(f"{path}: expected header {','.join(CSV_HEADER)}, got {header}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            try:
                rows.append(CsvRow(int(row[0]), float(row[1]), float(row[2]), float(row[3])))
            except (IndexError, ValueError):
                raise DimensionError(f"{path}:{line_no}: malformed row {row}") from None
    return rows


def summary_line(name: str, final_f: float | None, iterations: int, status: str) -> str:
    value = "nan" if final_f is None else format_real(final_f)
    status = " ".join(status.split())
    return f"name={name} final_f={value} iters={iterations} status={status}"


def parse_summary_line(line: str) -> dict:
    """Inverse of summary_line; the status field may contain spaces."""
    head, _, status = line.rstrip("\n").partition(" status=")
    fields = dict(token.split("=", 1) for token in head.split())
    return {
        "name": fields["name"],
        "final_f": float(fields["final_f"]),
        "iters": int(fields["iters"]),
        "status": status,
    }


def write_summary(directory: Path, lines: list[str], payload: dict) -> tuple[Path, Path]:
    directory.mkdir(parents=True, exist_ok=True)
    text_path = directory / "summary.txt"
    json_path = directory / "summary.json"
    text_path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8", newline="\n")
    json_path.write_text(json.dumps(payload, ensure_ascii=False, indent=4), encoding="utf-8")
    return text_path, json_path


def write_convergence_svg(path: str | Path, traces: dict[str, list[float]]) -> Path | None:
    """Line chart of log10 f per iteration, one line per run."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as e:
        logger.warning(f"matplotlib unavailable, skipping chart: {e}")
        return None
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, trace in traces.items():
        values = np.maximum(np.asarray(trace, dtype=np.float64), np.finfo(np.float64).tiny)
        ax.plot(np.arange(len(values)), np.log10(values), label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("log10 f")
    if traces:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
