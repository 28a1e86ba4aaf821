import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path


def resolve_repo_root():
    return Path(__file__).resolve().parent.parent


REPO_ROOT = resolve_repo_root()
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from app.core.errors import QuboLinError
from app.core.experiments.report_files import parse_summary_line, read_convergence_csv


@dataclass(frozen=True)
class RunSummary:
    name: str
    status: str
    iters: int
    final_f: float
    first_f: float | None
    crossing_iter: int | None
    # mean change of log10 f per iteration between the first and the last row
    log10_slope: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def summarize_run(run_dir: Path, entry: dict, threshold: float) -> RunSummary:
    csv_path = run_dir / f"{entry['name']}.csv"
    rows = read_convergence_csv(csv_path) if csv_path.exists() else []
    crossing = next((row.iteration for row in rows if row.f_value <= threshold), None)
    slope = None
    if len(rows) > 1 and rows[0].f_value > 0 and rows[-1].f_value > 0:
        span = rows[-1].iteration - rows[0].iteration
        slope = (math.log10(rows[-1].f_value) - math.log10(rows[0].f_value)) / span
    return RunSummary(
        name=entry["name"],
        status=entry["status"],
        iters=entry["iters"],
        final_f=entry["final_f"],
        first_f=rows[0].f_value if rows else None,
        crossing_iter=crossing,
        log10_slope=slope,
    )


def collect(run_dir: Path, threshold: float) -> list[RunSummary]:
    summary_path = run_dir / "summary.txt"
    lines = summary_path.read_text(encoding="utf-8").splitlines()
    return [summarize_run(run_dir, parse_summary_line(line), threshold) for line in lines if line.strip()]


def main(argv=None):
    parser = argparse.ArgumentParser(description="Convergence summary of an experiment directory")
    parser.add_argument("run_dir", help="Directory holding summary.txt and the run CSVs")
    parser.add_argument("--threshold", type=float, default=1e-8, help="f level whose first crossing is reported")
    parser.add_argument("--human", action="store_true", help="Print human-readable table instead of JSON")
    args = parser.parse_args(argv)

    run_dir = Path(args.run_dir)
    try:
        runs = collect(run_dir, args.threshold)
    except (OSError, QuboLinError, KeyError, ValueError) as e:
        print(f"[ERROR] Cannot read {run_dir}: {e}", file=sys.stderr)
        return 1

    if args.human:
        _print_human(runs, run_dir, args.threshold)
    else:
        print(f"run_dir={run_dir}")
        print(json.dumps([run.to_dict() for run in runs], ensure_ascii=False, indent=2))
    return 0


def _print_human(runs, run_dir, threshold):
    div = "-" * 72
    print(f"run_dir={run_dir}")
    print(f"threshold={threshold:g}\n")
    print(f"  {'run':<32}{'iters':>6}{'final f':>14}{'cross':>7}{'slope':>10}")
    print(f"  {div}")
    for run in runs:
        cross = "-" if run.crossing_iter is None else str(run.crossing_iter)
        slope = "-" if run.log10_slope is None else f"{run.log10_slope:.3f}"
        print(f"  {run.name:<32}{run.iters:>6}{run.final_f:>14.4e}{cross:>7}{slope:>10}")
        if run.status != "ok":
            print(f"    status: {run.status}")


if __name__ == "__main__":
    raise SystemExit(main())
