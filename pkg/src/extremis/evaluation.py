"""Evaluation of DAMEX scores on the extreme region of a test set.

Training uses a random share of the normal rows; the test set holds the
remaining normal rows and every anomaly. Metrics are computed only on test
points whose standardized radius exceeds ``sqrt(n_train)``.
"""

import csv
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np
from scipy.stats import rankdata

from .damex import DamexParams, fit, score_samples
from .errors import InvalidInputError, UndefinedMetricError
from .ranks import as_feature_matrix
from .simulate import worker_count


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self):
        X = as_feature_matrix(self.features, name="features")
        y = np.asarray(self.labels).astype(np.int8).reshape(-1)
        if len(y) != len(X):
            raise InvalidInputError(f"{len(y)} labels for {len(X)} rows")
        if not np.isin(y, (0, 1)).all():
            raise InvalidInputError("labels must be 0 (normal) or 1 (anomaly)")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def n(self):
        return len(self.labels)

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def anomaly_rate(self):
        return float(self.labels.mean())


def extreme_mask(model, data):
    """Rows whose radius ``max_j T(x)_j`` exceeds ``sqrt(n_train)``."""
    X = as_feature_matrix(data)
    if X.shape[1] != model.d:
        raise InvalidInputError(f"expected {model.d} features, got {X.shape[1]}")
    radii = model.ranker.standardize(X).max(axis=1)
    return radii > math.sqrt(model.n_train)


def _check_binary(scores, labels, need_negatives=True):
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels).astype(bool).reshape(-1)
    if len(s) != len(y):
        raise InvalidInputError(f"{len(s)} scores for {len(y)} labels")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("scores must be finite")
    P = int(y.sum())
    if P == 0:
        raise UndefinedMetricError("no positive labels; the metric is undefined")
    if need_negatives and P == len(y):
        raise UndefinedMetricError("no negative labels; ROC AUC is undefined")
    return s, y, P


def roc_auc(scores, labels):
    """Mann-Whitney estimate of ``P(score_pos > score_neg)``, ties counting 1/2.

    ``scores`` are abnormality scores: larger means more abnormal.
    """
    s, y, P = _check_binary(scores, labels)
    N = len(y) - P
    ranks = rankdata(s)
    u = ranks[y].sum() - P * (P + 1) / 2.0
    return u / (P * N)


def _sweep(s, y):
    """Cumulative (tp, fp) at the end of each block of tied scores, descending."""
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.cumsum(y)[ends]
    fp = (ends + 1) - tp
    return tp, fp


def pr_auc(scores, labels):
    """Average precision, ``sum_k (R_k - R_{k-1}) P_k`` with tied scores as one step."""
    s, y, P = _check_binary(scores, labels, need_negatives=False)
    tp, fp = _sweep(s, y)
    dtp = np.diff(np.r_[0, tp])
    terms = (dtp * tp) / (tp + fp)
    return math.fsum(terms[dtp > 0]) / P


def roc_curve(scores, labels):
    s, y, P = _check_binary(scores, labels)
    N = len(y) - P
    tp, fp = _sweep(s, y)
    return np.r_[0.0, fp / N], np.r_[0.0, tp / P]


def pr_curve(scores, labels):
    s, y, P = _check_binary(scores, labels, need_negatives=False)
    tp, fp = _sweep(s, y)
    return tp / P, tp / (tp + fp)


GRID = np.linspace(0.0, 1.0, 101)


def _interp_roc(fpr, tpr):
    # step-up convention: at a shared fpr take the largest tpr
    return np.interp(GRID, fpr, tpr, left=0.0, right=1.0)


def _interp_pr(recall, precision):
    # interpolated precision: best precision at recall >= r
    best = np.maximum.accumulate(precision[::-1])[::-1]
    idx = np.searchsorted(recall, GRID, side="left")
    out = np.zeros_like(GRID)
    ok = idx < len(recall)
    out[ok] = best[idx[ok]]
    return out


@dataclass
class EvalReport:
    n_test: float
    n_extreme: float
    anomaly_rate_extreme: float
    roc_auc: float
    pr_auc: float
    params: dict
    runs: int
    degenerate_runs: List[int] = field(default_factory=list)
    per_run: List[dict] = field(default_factory=list)
    baseline_roc_auc: Optional[float] = None
    baseline_pr_auc: Optional[float] = None
    roc_curve: dict = field(default_factory=dict)
    pr_curve: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def load_baseline_scores(path, n_rows):
    """Read ``row_index,abnormality_score`` into an array (NaN where absent)."""
    out = np.full(n_rows, np.nan)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["row_index", "abnormality_score"]:
            raise InvalidInputError(
                f"{path}: expected header 'row_index,abnormality_score', got {header!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                i, v = int(row[0]), float(row[1])
            except (ValueError, IndexError):
                raise InvalidInputError(f"{path}:{lineno}: malformed row {row!r}")
            if not 0 <= i < n_rows:
                raise InvalidInputError(f"{path}:{lineno}: row_index {i} out of range")
            out[i] = v
    return out


def _one_run(dataset, params, seed, train_fraction, baseline):
    rng = np.random.default_rng(seed)
    normal = np.flatnonzero(dataset.labels == 0)
    anomalies = np.flatnonzero(dataset.labels == 1)
    perm = rng.permutation(normal)
    n_train = int(round(train_fraction * len(normal)))
    train = np.sort(perm[:n_train])
    test = np.sort(np.r_[perm[n_train:], anomalies])
    model = fit(dataset.features[train], params)
    mask = extreme_mask(model, dataset.features[test])
    ext = test[mask]
    y = dataset.labels[ext]
    info = {"seed": seed, "n_train": int(n_train), "n_test": int(len(test)), "n_extreme": int(len(ext))}
    if len(ext) == 0 or y.min() == y.max():
        info["degenerate"] = True
        return info, None
    s, _, _ = score_samples(model, dataset.features[ext])
    abnormality = -s
    info.update(
        degenerate=False,
        anomaly_rate_extreme=float(y.mean()),
        roc_auc=roc_auc(abnormality, y),
        pr_auc=pr_auc(abnormality, y),
    )
    curves = (
        _interp_roc(*roc_curve(abnormality, y)),
        _interp_pr(*pr_curve(abnormality, y)),
    )
    if baseline is not None:
        b = baseline[ext]
        if np.isnan(b).any():
            raise InvalidInputError("baseline score file does not cover every extreme test row")
        info["baseline_roc_auc"] = roc_auc(b, y)
        info["baseline_pr_auc"] = pr_auc(b, y)
    return info, curves


def run_benchmark(dataset, params=None, runs=20, seed=0, train_fraction=0.5,
                  baseline=None, workers=None):
    """Average extreme-region ROC/PR AUC over ``runs`` random splits.

    Run ``i`` uses ``default_rng(seed + i)``. Runs whose extreme region is
    empty or single-class are reported in ``degenerate_runs`` and excluded.
    ``baseline`` is an optional array of external abnormality scores indexed
    by dataset row.
    """
    params = DamexParams() if params is None else params
    if dataset.labels.min() == dataset.labels.max():
        raise UndefinedMetricError("dataset must contain both normal rows and anomalies")
    if not 0 < train_fraction < 1:
        raise InvalidInputError("train_fraction must lie in (0, 1)")
    workers = worker_count() if workers is None else workers
    seeds = [seed + i for i in range(runs)]

    def task(s):
        return _one_run(dataset, params, s, train_fraction, baseline)

    if workers > 1 and runs > 1:
        with ThreadPoolExecutor(max_workers=min(workers, runs)) as pool:
            results = list(pool.map(task, seeds))
    else:
        results = [task(s) for s in seeds]

    per_run = [info for info, _ in results]
    good = [(info, c) for info, c in results if not info["degenerate"]]
    degenerate = [info["seed"] for info in per_run if info["degenerate"]]
    if degenerate:
        warnings.warn(f"{len(degenerate)} run(s) had a degenerate extreme region and were excluded")
    if not good:
        raise UndefinedMetricError("every run had a degenerate extreme region")

    def mean(key, rows=good):
        return float(np.mean([info[key] for info, _ in rows]))

    report = EvalReport(
        n_test=float(np.mean([i["n_test"] for i in per_run])),
        n_extreme=float(np.mean([i["n_extreme"] for i in per_run])),
        anomaly_rate_extreme=mean("anomaly_rate_extreme"),
        roc_auc=mean("roc_auc"),
        pr_auc=mean("pr_auc"),
        params={**asdict(params), "train_fraction": train_fraction, "seed": seed},
        runs=runs,
        degenerate_runs=degenerate,
        per_run=per_run,
        roc_curve={"fpr": GRID.tolist(), "tpr": np.mean([c[0] for _, c in good], axis=0).tolist()},
        pr_curve={"recall": GRID.tolist(), "precision": np.mean([c[1] for _, c in good], axis=0).tolist()},
    )
    if baseline is not None:
        report.baseline_roc_auc = mean("baseline_roc_auc")
        report.baseline_pr_auc = mean("baseline_pr_auc")
    return report
