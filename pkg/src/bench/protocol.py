"""
Repeated stratified holdout benchmark.

Every run splits each dataset, trains the view forests and RFD matrices
once, and evaluates all requested methods on that same view stage.
"""
import logging
import time
from typing import Optional, Sequence

import numpy as np

from src.bench.splitting import stratified_split
from src.bench.statistics import average_ranks, compare, mean_std, rank_methods, sign_test
from src.config.constants import (
    BASELINE_METHOD,
    METHOD_DCS_RFD,
    STATIC_METHODS,
    STREAM_RUN,
    STREAM_SPLIT,
)
from src.config.settings import settings
from src.dcs.selection import dcs_predict_batch, train_dcs
from src.errors import ExperimentError, ParameterError
from src.forest.seeding import derive_seed
from src.ingestion.manifest import load_dataset
from src.models.dataset import MultiViewDataset
from src.models.experiment import ExperimentConfig
from src.models.report import Comparison, DatasetResult, MethodResult, RunDetail, RunReport
from src.multiview.model import ViewEnsemble, fit_final, fit_views
from src.weighting.static import compute_weights

logger = logging.getLogger(__name__)


def accuracy(predictions: np.ndarray, labels: np.ndarray) -> float:
    """Percentage of correct predictions."""
    return float(100.0 * np.mean(np.asarray(predictions) == np.asarray(labels)))


def evaluate_method(
    method: str,
    views: ViewEnsemble,
    train: MultiViewDataset,
    test: MultiViewDataset,
    config: ExperimentConfig,
    n_jobs: Optional[int] = None,
) -> tuple[float, Optional[list[float]], Optional[list], str]:
    """
    Fit one combination method on a fitted view stage and score it on test.

    Returns:
        (accuracy in percent, static weights or None, DCS transcript or None,
        fingerprint of the view stage the trained model holds)
    """
    if method in STATIC_METHODS:
        weights = compute_weights(method, views.matrices, views.labels, views.n_classes, views.forests)
        model = fit_final(views, weights, n_trees=config.effective_final_n_trees, n_jobs=n_jobs)
        predictions = model.predict_batch(test.views, n_jobs=n_jobs)
        return accuracy(predictions, test.labels), list(weights.weights), None, model.views.fingerprint()

    if method == METHOD_DCS_RFD:
        model = train_dcs(
            train,
            n_trees=config.n_trees,
            seed=views.seed,
            k=config.k,
            kappa=config.kappa,
            final_n_trees=config.effective_final_n_trees,
            views=views,
            n_jobs=n_jobs,
        )
        predictions, records = dcs_predict_batch(
            model, test.views, instance_ids=test.instance_ids, n_jobs=n_jobs
        )
        return accuracy(predictions, test.labels), None, records, model.views.fingerprint()

    raise ParameterError(f"unknown method {method}")


def run_once(
    dataset: MultiViewDataset,
    config: ExperimentConfig,
    run: int,
    n_jobs: Optional[int] = None,
) -> RunDetail:
    """
    One split of one dataset, all methods.

    Raises:
        ExperimentError: any failure, tagged with the run and stage
    """
    split_seed = derive_seed(config.seed, STREAM_SPLIT, run)
    forest_seed = derive_seed(config.seed, STREAM_RUN, run)
    stage = "split"
    started = time.perf_counter()
    try:
        train, test = stratified_split(dataset, config.train_fraction, split_seed)
        stage = "views"
        views = fit_views(train, n_trees=config.n_trees, seed=forest_seed, kappa=config.kappa, n_jobs=n_jobs)
        detail = RunDetail(
            run=run,
            split_seed=split_seed,
            forest_seed=forest_seed,
            n_train=train.n,
            n_test=test.n,
            fingerprint=views.fingerprint(),
        )

        for method in config.methods:
            stage = method
            score, weights, records, consumed = evaluate_method(
                method, views, train, test, config, n_jobs=n_jobs
            )
            detail.accuracies[method] = score
            detail.method_fingerprints[method] = consumed
            if weights is not None:
                detail.weights[method] = weights
            if records is not None and config.include_transcripts:
                detail.transcript = records
            logger.debug(f"{dataset.name} run {run}: {method} {score:.2f}%")

        stage = "fingerprint"
        drifted = [m for m, value in detail.method_fingerprints.items() if value != detail.fingerprint]
        if drifted:
            raise ExperimentError(f"view stage changed while evaluating {drifted}", run=run, stage=stage)

    except ExperimentError:
        raise
    except Exception as e:
        logger.error(f"{dataset.name} run {run} failed at {stage}: {e}")
        raise ExperimentError(str(e), run=run, stage=stage) from e

    logger.info(
        f"{dataset.name} run {run + 1}/{config.runs} done in {time.perf_counter() - started:.1f}s: "
        + ", ".join(f"{m}={a:.2f}" for m, a in detail.accuracies.items())
    )
    return detail


def run_dataset(
    dataset: MultiViewDataset,
    config: ExperimentConfig,
    n_jobs: Optional[int] = None,
) -> DatasetResult:
    """All runs of one dataset, aggregated per method."""
    logger.info(
        f"Benchmarking {dataset.name}: n={dataset.n}, Q={dataset.n_views}, "
        f"C={dataset.n_classes}, {config.runs} runs, methods {config.methods}"
    )
    details = [run_once(dataset, config, run, n_jobs=n_jobs) for run in range(config.runs)]

    aggregates = {}
    for method in config.methods:
        values = [detail.accuracies[method] for detail in details]
        aggregates[method] = (values, *mean_std(values))
    ranks = rank_methods({method: mean for method, (_, mean, _) in aggregates.items()})

    return DatasetResult(
        dataset=dataset.name,
        instances=dataset.n,
        views=dataset.n_views,
        classes=dataset.n_classes,
        imbalance_ratio=dataset.imbalance_ratio(),
        methods=[
            MethodResult(method=method, accuracies=values, mean=mean, std=std, rank=ranks[method])
            for method, (values, mean, std) in aggregates.items()
        ],
        runs=details,
    )


def compare_to_baseline(results: Sequence[DatasetResult], methods: Sequence[str], alpha: float) -> list[Comparison]:
    """Wins, ties, losses and sign test of each method against the baseline."""
    if BASELINE_METHOD not in methods:
        return []

    def means(method: str) -> list[float]:
        return [next(r.mean for r in result.methods if r.method == method) for result in results]

    baseline = means(BASELINE_METHOD)
    comparisons = []
    for method in methods:
        if method == BASELINE_METHOD:
            continue
        wins, ties, losses = compare(means(method), baseline)
        outcome = sign_test(wins, ties, losses, alpha)
        comparisons.append(Comparison(
            method=method,
            baseline=BASELINE_METHOD,
            wins=wins,
            ties=ties,
            losses=losses,
            threshold=outcome.threshold,
            significant=outcome.significant,
        ))
    return comparisons


def run_experiment(
    config: ExperimentConfig,
    datasets: Optional[Sequence[MultiViewDataset]] = None,
    n_jobs: Optional[int] = None,
) -> RunReport:
    """
    Run the full benchmark.

    Args:
        config: protocol parameters; its manifests are loaded unless
            datasets are given
        datasets: already loaded datasets
        n_jobs: joblib workers (results do not depend on it)

    Returns:
        The RunReport

    Raises:
        ParameterError: no dataset at all
        DatasetValidationError: a manifest does not match its files
        ExperimentError: a run failed
    """
    if datasets is None:
        datasets = [load_dataset(path) for path in config.manifests]
    if not datasets:
        raise ParameterError("the experiment names no dataset")
    alpha = settings.SIGN_TEST_ALPHA

    started = time.perf_counter()
    results = [run_dataset(dataset, config, n_jobs=n_jobs) for dataset in datasets]
    logger.info(f"Benchmark finished in {time.perf_counter() - started:.1f}s")

    return RunReport(
        methods=list(config.methods),
        n_trees=config.n_trees,
        final_n_trees=config.effective_final_n_trees,
        runs=config.runs,
        train_fraction=config.train_fraction,
        k=config.k,
        kappa=config.kappa,
        seed=config.seed,
        alpha=alpha,
        datasets=results,
        average_ranks=average_ranks([{r.method: r.rank for r in result.methods} for result in results]),
        comparisons=compare_to_baseline(results, config.methods, alpha),
    )
