"""
Report files.

CSV: one row per dataset and method, 4-decimal fixed floats.
JSON: the whole RunReport, no timestamps, stable across thread counts.
"""
import logging
from pathlib import Path

import pandas as pd

from src.config.constants import CSV_FLOAT_FORMAT
from src.models.report import RunReport

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["dataset", "method", "accuracy_mean", "accuracy_std", "rank", "runs"]


def report_frame(report: RunReport) -> pd.DataFrame:
    """Flat per-dataset, per-method table."""
    rows = [
        {
            "dataset": dataset.dataset,
            "method": result.method,
            "accuracy_mean": result.mean,
            "accuracy_std": result.std,
            "rank": result.rank,
            "runs": len(result.accuracies),
        }
        for dataset in report.datasets
        for result in dataset.methods
    ]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def write_csv(report: RunReport, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report_frame(report).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


def write_json(report: RunReport, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(report.model_dump_json(indent=2))
        f.write("\n")
    return path


def write_report(report: RunReport, directory: Path, stem: str = "report") -> tuple[Path, Path]:
    """
    Write <stem>.csv and <stem>.json into a directory.

    Returns:
        (csv path, json path)
    """
    directory = Path(directory)
    csv_path = write_csv(report, directory / f"{stem}.csv")
    json_path = write_json(report, directory / f"{stem}.json")
    logger.info(f"Report written to {csv_path} and {json_path}")
    return csv_path, json_path


def summary_lines(report: RunReport) -> list[str]:
    """Human-readable accuracy table and baseline comparisons."""
    lines = []
    for dataset in report.datasets:
        lines.append(f"{dataset.dataset} (n={dataset.instances}, Q={dataset.views}, C={dataset.classes}, IR={dataset.imbalance_ratio:.2f})")
        for result in dataset.methods:
            lines.append(f"  {result.method:<8} {result.mean:6.2f} ± {result.std:5.2f}  rank {result.rank:.1f}")
    if len(report.datasets) > 1:
        lines.append("Average ranks: " + ", ".join(f"{m}={r:.2f}" for m, r in report.average_ranks.items()))
    for comparison in report.comparisons:
        flag = "significant" if comparison.significant else "not significant"
        lines.append(
            f"{comparison.method} vs {comparison.baseline}: "
            f"{comparison.wins}/{comparison.ties}/{comparison.losses} (w/t/l), "
            f"threshold {comparison.threshold}, {flag}"
        )
    return lines
