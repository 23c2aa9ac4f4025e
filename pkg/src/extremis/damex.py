"""DAMEX: fit a sparse angular representation and score new points.

The fitted model keeps the sorted training columns (for the rank transform
of new points) and the thresholded subset masses. A point ``x`` is scored by
``s(x) = M(alpha(x)) / r`` with ``r = max_j T(x)_j`` the radius of its
standardization; smaller scores are more abnormal.
"""

import json
import math
import os
from dataclasses import asdict, dataclass
from typing import List, Optional, Union

import numpy as np

from . import subsets
from .errors import InvalidInputError, ModelFormatError, ModelVersionError, ParameterError
from .ranks import MarginalRanker, as_feature_matrix, fit_margins, standardize_training
from .subcone import (
    SparseAngularRepresentation,
    apply_threshold,
    assign_rectangle,
    check_params,
    estimate_masses,
)

FORMAT_VERSION = 1

SELF_SCALED = "self-scaled-cone"
FIXED_SCALE = "fixed-scale-rectangle"
MEMBERSHIP_MODES = (SELF_SCALED, FIXED_SCALE)


@dataclass(frozen=True)
class DamexParams:
    """Estimation settings; defaults are ``(k, epsilon, p) = (sqrt(n), 0.01, 0.1)``."""

    k: Union[int, str] = "auto"
    epsilon: float = 0.01
    p: float = 0.1
    membership_mode: str = SELF_SCALED

    def __post_init__(self):
        if isinstance(self.k, str):
            if self.k != "auto":
                raise ParameterError(f"k must be a positive integer or 'auto', got {self.k!r}")
        elif isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ParameterError(f"k must be a positive integer or 'auto', got {self.k!r}")
        if not 0.0 < float(self.epsilon) < 1.0:
            raise ParameterError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not (float(self.p) >= 0 and math.isfinite(self.p)):
            raise ParameterError(f"p must be finite and nonnegative, got {self.p!r}")
        if self.membership_mode not in MEMBERSHIP_MODES:
            raise ParameterError(
                f"membership_mode must be one of {MEMBERSHIP_MODES}, got {self.membership_mode!r}"
            )

    def resolve_k(self, n):
        k = math.isqrt(n) if self.k == "auto" else int(self.k)
        if not 1 <= k <= n:
            raise ParameterError(f"k={k} must lie in [1, n={n}]")
        return k


@dataclass(frozen=True)
class ScoreRecord:
    row: int
    score: float
    radius: float
    subset: Optional[int]


@dataclass(frozen=True, eq=False)
class DamexModel:
    ranker: MarginalRanker
    representation: SparseAngularRepresentation
    params: DamexParams

    @property
    def n_train(self):
        return self.ranker.n

    @property
    def d(self):
        return self.ranker.d

    @property
    def k(self):
        return self.representation.k


def fit(data, params=None):
    """Standardize, assign rectangles, estimate masses, threshold."""
    params = DamexParams() if params is None else params
    X = as_feature_matrix(data)
    n = X.shape[0]
    k = params.resolve_k(n)
    check_params(n, k, params.epsilon)
    ranker = fit_margins(X)
    V = standardize_training(X, ranker)
    rep = estimate_masses(V, k, params.epsilon)
    rep = apply_threshold(rep, params.p)
    return DamexModel(ranker=ranker, representation=rep, params=params)


def _membership(model, V):
    """Subset bits per row and a mask of rows that get a subset at all."""
    eps = model.params.epsilon
    if model.params.membership_mode == SELF_SCALED:
        r = V.max(axis=1)
        return V > eps * r[:, None], np.ones(len(V), dtype=bool)
    scale = model.n_train / model.k
    return V > eps * scale, V.max(axis=1) >= scale


def score_samples(model, X):
    """Vectorized scoring.

    Returns
    -------
    scores, radii : ndarray of shape (m,)
    codes : list of (int or None)
        Subset each row was matched to.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2 and X.shape[0] == 0:
        if X.shape[1] != model.d:
            raise InvalidInputError(f"expected {model.d} features, got {X.shape[1]}")
        return np.empty(0), np.empty(0), []
    X = as_feature_matrix(X)
    if X.shape[1] != model.d:
        raise InvalidInputError(f"expected {model.d} features, got {X.shape[1]}")
    V = model.ranker.standardize(X)
    radii = V.max(axis=1)
    bits, matched = _membership(model, V)
    codes = subsets.encode_rows(bits)
    masses = model.representation.masses
    mass = np.array([masses.get(c, 0.0) for c in codes])
    mass[~matched] = 0.0
    scores = mass / radii
    codes = [c if ok else None for c, ok in zip(codes, matched)]
    return scores, radii, codes


def score(model, x):
    """Score one point; returns a :class:`ScoreRecord` with ``row=0``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.d:
        raise InvalidInputError(f"expected a point with {model.d} coordinates, got shape {x.shape}")
    s, r, c = score_samples(model, x[None, :])
    return ScoreRecord(row=0, score=float(s[0]), radius=float(r[0]), subset=c[0])


def score_batch(model, data) -> List[ScoreRecord]:
    s, r, c = score_samples(model, data)
    return [
        ScoreRecord(row=i, score=float(s[i]), radius=float(r[i]), subset=c[i])
        for i in range(len(s))
    ]


def fixed_scale_subset(model, v):
    """Training-style rectangle of a standardized point (None if not extreme)."""
    return assign_rectangle(v, model.n_train, model.k, model.params.epsilon)


# -- persistence -------------------------------------------------------------

def to_dict(model):
    return {
        "version": FORMAT_VERSION,
        "params": asdict(model.params),
        "ranker": {"sorted_columns": model.ranker.sorted_columns.tolist()},
        "representation": model.representation.to_dict(),
    }


def from_dict(doc):
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise ModelVersionError(
            f"unsupported model version {version!r} (this release reads version {FORMAT_VERSION})"
        )
    try:
        params = DamexParams(**doc["params"])
        cols = np.array(doc["ranker"]["sorted_columns"], dtype=np.float64)
        ranker = MarginalRanker(cols)
        rep = SparseAngularRepresentation.from_dict(doc["representation"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from exc
    if rep.n != ranker.n or rep.d != ranker.d:
        raise ModelFormatError(
            f"representation (n={rep.n}, d={rep.d}) does not match ranker (n={ranker.n}, d={ranker.d})"
        )
    return DamexModel(ranker=ranker, representation=rep, params=params)


def save(model, sink):
    """Write ``model`` as JSON to a path or text file object."""
    text = json.dumps(to_dict(model))
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w") as fh:
            fh.write(text)
    else:
        sink.write(text)


def load(source):
    """Read a model written by :func:`save`."""
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            text = fh.read()
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"model file is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    return from_dict(doc)

