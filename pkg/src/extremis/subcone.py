"""Empirical exponent measure on epsilon-thickened rectangles.

A standardized point ``v`` with radius ``max_j v_j >= n/k`` is charged to
the subset ``{j : v_j > epsilon * n/k}``; the mass of a subset is the number
of points charged to it divided by ``k``.  Only charged subsets are stored,
keyed by integer bit masks (see :mod:`extremis.subsets`).
"""

import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Optional

import numpy as np

from . import subsets
from .errors import InvalidInputError, ParameterError
from .ranks import as_feature_matrix


class DegenerateRegimeWarning(UserWarning):
    """epsilon <= k/n: every extreme point falls in the central rectangle."""


@dataclass(frozen=True)
class SparseAngularRepresentation:
    """Charged subsets and their masses, plus the estimation settings."""

    masses: Dict[int, float]
    n: int
    k: int
    epsilon: float
    d: int
    p: float = 0.0
    thresholded: bool = False
    n_extreme: int = 0

    def __len__(self):
        return len(self.masses)

    @property
    def total_mass(self):
        return math.fsum(self.masses.values())

    def mass(self, alpha):
        return self.masses.get(alpha, 0.0)

    def subsets(self):
        """Charged subsets, as sorted lists of 1-based feature indices."""
        return [subsets.members(a) for a in sorted(self.masses, key=_subset_order)]

    def to_dict(self):
        items = sorted(self.masses.items(), key=lambda kv: _subset_order(kv[0]))
        return {
            "n": self.n,
            "k": self.k,
            "epsilon": self.epsilon,
            "p": self.p,
            "d": self.d,
            "thresholded": self.thresholded,
            "n_extreme": self.n_extreme,
            "masses": [{"subset": subsets.members(a), "mass": m} for a, m in items],
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            masses = {}
            for entry in doc["masses"]:
                masses[subsets.from_indices(entry["subset"])] = float(entry["mass"])
            d = int(doc["d"]) if "d" in doc else max(
                (a.bit_length() for a in masses), default=1
            )
            return cls(
                masses=masses,
                n=int(doc["n"]),
                k=int(doc["k"]),
                epsilon=float(doc["epsilon"]),
                d=d,
                p=float(doc.get("p", 0.0)),
                thresholded=bool(doc.get("thresholded", False)),
                n_extreme=int(doc.get("n_extreme", 0)),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed representation document: {exc!r}")


def _subset_order(mask):
    return (subsets.size(mask), subsets.members(mask))


def check_params(n, k, epsilon):
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= n):
        raise ParameterError(f"k must be an integer in [1, n={n}], got {k!r}")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def assign_rectangle(v, n, k, epsilon) -> Optional[int]:
    """Subset whose rectangle ``(n/k) R_alpha^eps`` contains ``v``, or None.

    >>> assign_rectangle([12.0, 5.0], n=100, k=10, epsilon=0.1)
    3
    """
    v = np.asarray(v, dtype=np.float64)
    scale = n / k
    if v.max() < scale:
        return None
    return subsets.encode_rows((v > epsilon * scale)[None, :])[0]


def estimate_masses(V, k, epsilon, n=None):
    """Mass of every charged epsilon-rectangle from a standardized sample.

    Parameters
    ----------
    V : array of shape (n, d)
        Rank-standardized training points.
    k : int
        Number of extremes; ``n/k`` is the radial threshold.
    epsilon : float
        Tolerance below which (after scaling by ``n/k``) a coordinate is
        considered small.
    n : int, optional
        Sample size, defaults to ``len(V)``.
    """
    V = as_feature_matrix(V, name="V")
    n = V.shape[0] if n is None else int(n)
    check_params(n, k, epsilon)
    if epsilon <= k / n:
        warnings.warn(
            f"epsilon={epsilon} <= k/n={k / n:.4g}: every extreme point is "
            "charged to the full feature set",
            DegenerateRegimeWarning,
            stacklevel=2,
        )
    scale = n / k
    extreme = V.max(axis=1) >= scale
    counts = subsets.count_rows(V[extreme] > epsilon * scale)
    masses = {a: c / k for a, c in counts.items()}
    return SparseAngularRepresentation(
        masses=masses,
        n=n,
        k=int(k),
        epsilon=float(epsilon),
        d=V.shape[1],
        n_extreme=int(extreme.sum()),
    )


def apply_threshold(rep, p):
    """Drop subsets whose mass is below ``p`` times the mean charged mass.

    The threshold is computed once, from the unthresholded representation.
    Re-applying the same ``p`` to a thresholded result returns it unchanged;
    a different ``p`` raises, since the pre-threshold masses are gone.
    """
    if p < 0 or not np.isfinite(p):
        raise ParameterError(f"p must be a finite nonnegative number, got {p!r}")
    if rep.thresholded:
        if p == rep.p:
            return rep
        raise ParameterError(
            f"representation already thresholded with p={rep.p}; cannot re-threshold with p={p}"
        )
    if not rep.masses:
        return replace(rep, p=float(p), thresholded=True)
    threshold = p * math.fsum(rep.masses.values()) / len(rep.masses)
    kept = {a: m for a, m in rep.masses.items() if not m < threshold}
    return replace(rep, masses=kept, p=float(p), thresholded=True)


def dimension_histogram(rep):
    """Total mass per subset cardinality."""
    hist = {}
    for a, m in rep.masses.items():
        c = subsets.size(a)
        hist[c] = hist.get(c, 0.0) + m
    return dict(sorted(hist.items()))


def _floor_k(k, x):
    # exact floor(k * x) for the float x, immune to rounding of the product
    return math.floor(Fraction(float(x)) * k)


def _upper_thresholds(sorted_cols, k, x, name):
    """Per-feature order statistic ``X_(n - floor(k x_j) + 1)``; +inf when floor is 0."""
    d, n = sorted_cols.shape
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != d:
        raise InvalidInputError(f"{name} must have {d} coordinates, got {x.shape[0]}")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ParameterError(f"{name} must be finite and nonnegative")
    out = np.full(d, np.inf)
    for j in range(d):
        m = _floor_k(k, x[j])
        if m > n:
            raise ParameterError(
                f"floor(k * {name}[{j}]) = {m} exceeds n = {n}"
            )
        if m >= 1:
            out[j] = sorted_cols[j, n - m]
    return out


def _sorted_columns(data):
    X = as_feature_matrix(data)
    return X, np.sort(X, axis=0).T


def empirical_stdf(data, k, x):
    """Empirical stable tail dependence function ``l_n(x)``.

    Counts rows where some feature reaches its ``floor(k x_j)``-th largest
    value, divided by ``k``. Coordinates with ``floor(k x_j) = 0`` never fire.
    """
    X, cols = _sorted_columns(data)
    if k < 1:
        raise ParameterError(f"k must be positive, got {k!r}")
    thr = _upper_thresholds(cols, k, x, "x")
    hit = (X >= thr).any(axis=1)
    return hit.sum() / k


def empirical_g(data, k, x, z, alpha, beta=0):
    """Empirical counterpart of ``g_{alpha,beta}(x, z)``.

    Rows count when ``X^j >= X^j_(n - floor(k x_j) + 1)`` for all ``j`` in
    ``alpha`` and ``X^j < X^j_(n - floor(k z_j) + 1)`` for all ``j`` in
    ``beta``. ``alpha`` and ``beta`` are subset masks; ``beta`` may be 0.
    """
    X, cols = _sorted_columns(data)
    d = X.shape[1]
    if k < 1:
        raise ParameterError(f"k must be positive, got {k!r}")
    alpha = subsets.check(alpha, d)
    beta = int(beta)
    if beta < 0 or beta >> d:
        raise InvalidInputError(f"beta has features beyond d={d}")
    x_thr = _upper_thresholds(cols, k, x, "x")
    z_thr = _upper_thresholds(cols, k, z, "z")
    a = subsets.to_bool(alpha, d)
    b = subsets.to_bool(beta, d)
    ok = (X[:, a] >= x_thr[a]).all(axis=1) & (X[:, b] < z_thr[b]).all(axis=1)
    return ok.sum() / k
