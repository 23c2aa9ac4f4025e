"""Marginal empirical CDFs and the rank standardization to Pareto scale.

Each feature is mapped through ``x -> 1 / (1 - F_j(x))`` where ``F_j`` is the
empirical CDF with a *strict* inequality, ``F_j(x) = #{X_i^j < x} / n``.
Training points therefore land on ``n / (n - c)`` with ``c`` the number of
training values strictly below them; points above the training maximum
(``F_j = 1``) are clamped to ``cap = 2n``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# batches at least this long are sorted before the table lookup
_PRESORT_MIN = 4096


def as_feature_matrix(data, name="data"):
    """Validate and return ``data`` as a 2-d float64 array.

    1-d input is read as a single feature column. Rejects empty matrices
    and non-finite entries.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be a 2-d matrix, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} is empty (shape {arr.shape})")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise InvalidInputError(
            f"{name} has a non-finite entry at row {bad[0]}, column {bad[1]}"
        )
    return arr


@dataclass(frozen=True, eq=False)
class MarginalRanker:
    """Per-feature sorted training columns.

    Attributes
    ----------
    sorted_columns : ndarray of shape (d, n)
        Row ``j`` is the ascending copy of training feature ``j``.
    """

    sorted_columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.sorted_columns, dtype=np.float64)
        if cols.ndim != 2 or cols.size == 0:
            raise InvalidInputError("sorted_columns must be a nonempty (d, n) array")
        if np.any(np.diff(cols, axis=1) < 0):
            raise InvalidInputError("sorted_columns must be sorted ascending")
        cols.setflags(write=False)
        object.__setattr__(self, "sorted_columns", cols)

    @property
    def d(self):
        return self.sorted_columns.shape[0]

    @property
    def n(self):
        return self.sorted_columns.shape[1]

    @property
    def cap(self):
        return 2.0 * self.n

    def count_below(self, X):
        """Number of training values strictly below each entry of ``X`` (m, d)."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise InvalidInputError(
                f"expected {self.d} features, got array of shape {X.shape}"
            )
        counts = np.empty(X.shape, dtype=np.int64)
        for j in range(self.d):
            q = X[:, j]
            if len(q) < _PRESORT_MIN:
                counts[:, j] = np.searchsorted(self.sorted_columns[j], q, side="left")
            else:
                # sorted queries walk the table in order, which keeps large batches near n log n
                order = np.argsort(q, kind="stable")
                counts[order, j] = np.searchsorted(self.sorted_columns[j], q[order], side="left")
        return counts

    def empirical_cdf(self, j, x):
        """``F_j(x) = #{training values < x} / n`` for 0-based feature ``j``."""
        if not 0 <= j < self.d:
            raise IndexError(f"feature index {j} out of range for d={self.d}")
        c = np.searchsorted(self.sorted_columns[j], x, side="left")
        return c / self.n

    def order_statistic(self, j, r):
        """``X^j_(r)``, the r-th smallest training value (1-based ``r``)."""
        if not 1 <= r <= self.n:
            raise IndexError(f"order statistic {r} out of range for n={self.n}")
        return self.sorted_columns[j, r - 1]

    def standardize(self, X):
        """Map raw points to Pareto scale; returns an array shaped like ``X``.

        Accepts a single point of length ``d`` or an (m, d) batch.
        """
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.d:
            raise InvalidInputError(
                f"expected {self.d} features, got array of shape {X.shape}"
            )
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("points to standardize must be finite")
        V = pareto_from_counts(self.count_below(X), self.n)
        return V[0] if single else V


def pareto_from_counts(counts, n):
    """``n / (n - c)``, with ``c == n`` mapped to the cap ``2n``."""
    counts = np.asarray(counts)
    gap = n - counts
    with np.errstate(divide="ignore"):
        V = np.where(gap > 0, n / np.maximum(gap, 1), 2.0 * n)
    return V.astype(np.float64)


def fit_margins(data):
    """Sort each training column; O(d n log n)."""
    X = as_feature_matrix(data)
    return MarginalRanker(np.sort(X, axis=0).T.copy())


def standardize_training(data, ranker=None):
    """Rank-standardized training sample, shape (n, d).

    With distinct values in a column, the entry for ascending rank ``r`` is
    ``n / (n - r + 1)``.
    """
    X = as_feature_matrix(data)
    if ranker is None:
        ranker = fit_margins(X)
    return ranker.standardize(X)
