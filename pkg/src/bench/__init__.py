"""Benchmark protocol: splits, runs, statistics and reports."""

from src.bench.protocol import accuracy, evaluate_method, run_dataset, run_experiment, run_once
from src.bench.reporting import report_frame, summary_lines, write_csv, write_json, write_report
from src.bench.splitting import split_indices, stratified_split
from src.bench.statistics import (
    SignTestResult,
    average_ranks,
    compare,
    mean_std,
    rank_methods,
    sign_test,
    sign_threshold,
)

__all__ = [
    "SignTestResult",
    "accuracy",
    "average_ranks",
    "compare",
    "evaluate_method",
    "mean_std",
    "rank_methods",
    "report_frame",
    "run_dataset",
    "run_experiment",
    "run_once",
    "sign_test",
    "sign_threshold",
    "split_indices",
    "stratified_split",
    "summary_lines",
    "write_csv",
    "write_json",
    "write_report",
]
