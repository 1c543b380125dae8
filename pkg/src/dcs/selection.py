"""
Dynamic view-subset selection.

For each test instance and each candidate: fuse the instance's view
projections over the candidate's views, take its k nearest training rows
under the candidate's RFD measure, score the candidate by its OOB accuracy
on those rows, then let the best candidate predict.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.config.settings import settings
from src.dcs.pool import CandidateClassifier, CandidatePool, generate_pool, project_candidate
from src.dissim.matrix import Measure, project_batch
from src.errors import ParameterError
from src.forest.forest import oob_error
from src.models.dataset import MultiViewDataset
from src.models.selection import CandidateScore, SelectionRecord
from src.multiview.model import ViewEnsemble, fit_views
from src.persistence import load_object, save_object

logger = logging.getLogger(__name__)

MODEL_KIND = "dcs_model"

CRITERIA = ("oob", "lca")
SELECTIONS = ("accuracy", "literal_error")


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in 1..{n}, got {k}")


def candidate_distances(candidate: CandidateClassifier, X_proj: np.ndarray) -> np.ndarray:
    """(t, n) RFD between fused test rows and the candidate's training rows."""
    X_proj = np.atleast_2d(X_proj)
    return project_batch(
        candidate.forest, candidate.hardness, X_proj, Measure.rfd(candidate.hardness.kappa), n_jobs=1
    )


def regions_of_competence(candidate: CandidateClassifier, X_proj: np.ndarray, k: int) -> np.ndarray:
    """(t, k) nearest training indices per test row, ties to the lowest index."""
    _check_k(k, candidate.forest.training.n)
    distances = candidate_distances(candidate, X_proj)
    return np.argsort(distances, axis=1, kind="stable")[:, :k]


def region_of_competence(candidate: CandidateClassifier, x_proj: np.ndarray, k: int) -> np.ndarray:
    """The k training instances closest to x_proj in the candidate's space."""
    return regions_of_competence(candidate, np.asarray(x_proj)[None, :], k)[0]


def competence(candidate: CandidateClassifier, region: Sequence[int]) -> Optional[float]:
    """OOB accuracy of the candidate on the region, None when undefined."""
    error = oob_error(candidate.forest, region)
    return None if error is None else 1.0 - error


def lca_competence(candidate: CandidateClassifier, region: Sequence[int], predicted: int) -> Optional[float]:
    """
    Local class accuracy with OOB votes.

    Among the region instances the candidate OOB-predicts as `predicted`,
    the fraction truly of that class; None when there is none. This is the
    "correct among neighbours assigned the predicted class" reading: both
    counts are restricted to region instances with at least one OOB tree.
    """
    region = np.asarray(region, dtype=np.int64)
    oob = candidate.forest.oob_predictions[region]
    labels = candidate.forest.training.labels[region]
    claimed = oob == predicted
    if not claimed.any():
        return None
    return float(np.mean(labels[claimed] == predicted))


def _batch_competence(candidate, regions, predictions, criterion) -> np.ndarray:
    """(t,) competences with NaN for undefined ones."""
    oob = candidate.forest.oob_predictions[regions]
    labels = candidate.forest.training.labels[regions]
    if criterion == "lca":
        counted = oob == predictions[:, None]
        correct = counted & (labels == predictions[:, None])
    else:
        counted = oob >= 0
        correct = counted & (oob == labels)
    totals = counted.sum(axis=1)
    hits = correct.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(totals > 0, hits / totals, np.nan)


def _evaluate_candidate(candidate, view_projections, k, criterion):
    fused = project_candidate(candidate, view_projections)
    regions = regions_of_competence(candidate, fused, k)
    predictions = candidate.forest.predict_batch(fused)
    scores = _batch_competence(candidate, regions, predictions, criterion)
    return regions, predictions, scores


@dataclass(eq=False)
class DCSModel:
    """
    A trained dynamic selection model.

    Attributes:
        views: per-view forests, hardness tables and matrices
        pool: the 2^Q - 1 candidates
        k: region size
        criterion: "oob" (OOB accuracy) or "lca"
        selection: "accuracy" maximizes competence, "literal_error"
            maximizes the OOB error instead
    """
    views: ViewEnsemble
    pool: CandidatePool
    k: int
    criterion: str = "oob"
    selection: str = "accuracy"


def select(
    candidates: list,
    scores: list[Optional[float]],
    selection: str = "accuracy",
) -> Optional[int]:
    """
    Position of the chosen candidate, None when every score is undefined.

    Highest competence wins (lowest with literal_error); ties prefer more
    views, then the lowest mask key.
    """
    best, best_key = None, None
    for position, (candidate, score) in enumerate(zip(candidates, scores)):
        if score is None:
            continue
        value = score if selection == "accuracy" else 1.0 - score
        key = (value, candidate.mask.size, -candidate.mask.key)
        if best_key is None or key > best_key:
            best, best_key = position, key
    return best


def dcs_predict_batch(
    model: DCSModel,
    X_views: Sequence[np.ndarray],
    k: Optional[int] = None,
    instance_ids=None,
    n_jobs: Optional[int] = None,
) -> tuple[np.ndarray, list[SelectionRecord]]:
    """
    Predict test instances with per-instance candidate selection.

    Args:
        model: trained DCSModel
        X_views: one (t, m_q) matrix per view
        k: region size (default: model.k)
        instance_ids: ids written to the transcript (default: 0..t-1)
        n_jobs: joblib workers over candidates

    Returns:
        (predictions, selection records)
    """
    k = k or model.k
    _check_k(k, model.views.n)
    view_projections = model.views.project(X_views, n_jobs=n_jobs)
    t = view_projections[0].shape[0]
    ids = [str(i) for i in (range(t) if instance_ids is None else instance_ids)]

    candidates = model.pool.candidates
    evaluated = Parallel(n_jobs=n_jobs or settings.N_JOBS)(
        delayed(_evaluate_candidate)(candidate, view_projections, k, model.criterion)
        for candidate in candidates
    )

    predictions = np.empty(t, dtype=np.int64)
    records = []
    n_fallback = 0
    for row in range(t):
        scores = []
        for _, _, candidate_scores in evaluated:
            value = candidate_scores[row]
            scores.append(None if np.isnan(value) else float(value))

        chosen = select(candidates, scores, model.selection)
        fallback = chosen is None
        if fallback:
            n_fallback += 1
            chosen = len(candidates) - 1

        predictions[row] = evaluated[chosen][1][row]
        mask = candidates[chosen].mask
        records.append(SelectionRecord(
            instance_id=ids[row],
            chosen_mask=str(mask),
            chosen_views=[model.views.view_names[q] for q in mask.views],
            prediction=int(predictions[row]),
            fallback=fallback,
            candidates=[
                CandidateScore(
                    mask=str(candidate.mask),
                    competence=score,
                    region=[int(j) for j in regions[row]],
                    prediction=int(candidate_predictions[row]),
                )
                for candidate, score, (regions, candidate_predictions, _) in zip(candidates, scores, evaluated)
            ],
        ))

    if n_fallback:
        logger.warning(
            f"{n_fallback} of {t} instances had no defined competence, used the all-views candidate"
        )
    return predictions, records


def dcs_predict(model: DCSModel, x_views: Sequence[np.ndarray], k: Optional[int] = None) -> int:
    """Class of a single instance given as one feature vector per view."""
    batch = [np.asarray(x, dtype=np.float64)[None, :] for x in x_views]
    predictions, _ = dcs_predict_batch(model, batch, k=k)
    return int(predictions[0])


def train_dcs(
    dataset: MultiViewDataset,
    n_trees: Optional[int] = None,
    seed: int = 0,
    k: Optional[int] = None,
    kappa: Optional[int] = None,
    final_n_trees: Optional[int] = None,
    criterion: Optional[str] = None,
    selection: Optional[str] = None,
    pool_cap: Optional[int] = None,
    views: Optional[ViewEnsemble] = None,
    n_jobs: Optional[int] = None,
) -> DCSModel:
    """
    Train view forests (unless given) and the candidate pool.

    Args:
        dataset: training views and labels
        n_trees: trees per view forest
        seed: master seed, shared with the static models so the all-views
            candidate matches their final forest
        k: region size (default: settings.DCS_K)
        kappa: kDN neighbour count
        final_n_trees: trees per candidate (default: n_trees)
        criterion: "oob" or "lca" (default: settings.DCS_CRITERION)
        selection: "accuracy" or "literal_error" (default: settings.DCS_SELECTION)
        pool_cap: largest Q accepted
        views: an already fitted view stage to reuse
        n_jobs: joblib workers
    """
    criterion = criterion or settings.DCS_CRITERION
    selection = selection or settings.DCS_SELECTION
    if criterion not in CRITERIA:
        raise ParameterError(f"unknown competence criterion {criterion}")
    if selection not in SELECTIONS:
        raise ParameterError(f"unknown selection rule {selection}")
    k = k or settings.DCS_K

    if views is None:
        views = fit_views(dataset, n_trees=n_trees, seed=seed, kappa=kappa, n_jobs=n_jobs)
    _check_k(k, views.n)
    pool = generate_pool(
        views.matrices,
        views.labels,
        n_trees=final_n_trees or n_trees or settings.final_n_trees,
        seed=views.seed,
        n_classes=views.n_classes,
        kappa=kappa,
        pool_cap=pool_cap,
        n_jobs=n_jobs,
    )
    return DCSModel(views=views, pool=pool, k=k, criterion=criterion, selection=selection)


def write_transcript(records: Sequence[SelectionRecord], path: Path) -> Path:
    """Write selection records as JSON lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(record.model_dump_json() + "\n")
    return path


def save_dcs_model(model: DCSModel, path: Path) -> Path:
    return save_object(model, path, MODEL_KIND)


def load_dcs_model(path: Path) -> DCSModel:
    return load_object(path, MODEL_KIND)
