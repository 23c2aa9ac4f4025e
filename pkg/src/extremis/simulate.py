"""Multivariate asymmetric logistic max-stable model.

The joint CDF with charged subsets ``alpha_1..alpha_K`` and dependence
parameters ``w_m`` is

    G(x) = exp{-sum_m (sum_{j in alpha_m} (A_j x_j)^(-1/w_m))^(w_m)}

with ``A_j`` the number of subsets containing feature ``j``. Margins are
unit Frechet. Sampling combines one symmetric logistic block per subset,
each built from a positive stable mixing variable, and takes coordinatewise
maxima of the blocks scaled by ``1/A_j``.
"""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.special import logsumexp

from . import subsets
from .damex import DamexParams, fit
from .errors import InvalidInputError, ParameterError


@dataclass(frozen=True)
class LogisticSpec:
    """Ground-truth dependence structure.

    Attributes
    ----------
    d : int
    subsets : tuple of int
        Charged subsets as bit masks.
    w : tuple of float
        Dependence parameter per subset, in (0, 1]; small means strong
        dependence within the subset.
    """

    d: int
    subsets: tuple
    w: tuple

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(int(a) for a in self.subsets))
        w = self.w
        if np.isscalar(w):
            w = (float(w),) * len(self.subsets)
        object.__setattr__(self, "w", tuple(float(x) for x in w))
        if len(self.w) != len(self.subsets):
            raise InvalidInputError("need one dependence parameter per subset")
        if not self.subsets:
            raise InvalidInputError("at least one subset is required")
        if len(set(self.subsets)) != len(self.subsets):
            raise InvalidInputError("subsets must be distinct")
        cover = 0
        for a in self.subsets:
            subsets.check(a, self.d)
            cover |= a
        if cover != subsets.full(self.d):
            missing = subsets.members(subsets.full(self.d) & ~cover)
            raise InvalidInputError(f"features {missing} belong to no subset")
        for x in self.w:
            if not 0.0 < x <= 1.0:
                raise ParameterError(f"dependence parameters must lie in (0, 1], got {x}")

    @property
    def K(self):
        return len(self.subsets)

    @property
    def multiplicity(self):
        """``A_j``: number of subsets containing each feature (length d)."""
        counts = np.zeros(self.d, dtype=np.int64)
        for a in self.subsets:
            counts += subsets.to_bool(a, self.d)
        return counts

    def to_dict(self):
        return {
            "d": self.d,
            "subsets": [subsets.members(a) for a in self.subsets],
            "w": list(self.w),
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            d=int(doc["d"]),
            subsets=tuple(subsets.from_indices(s) for s in doc["subsets"]),
            w=tuple(doc["w"]),
        )


def random_support(d, K, rng, w=0.1):
    """Draw ``K`` distinct nonempty subsets of {1..d} uniformly.

    Features left uncovered are each appended to a uniformly chosen subset
    among those for which the addition does not create a duplicate.
    """
    total = (1 << d) - 1
    if not 1 <= K <= total:
        raise ParameterError(f"K must lie in [1, 2^d - 1 = {total}], got {K}")
    if d <= 62:
        chosen = [int(c) + 1 for c in rng.choice(total, size=K, replace=False)]
    else:
        seen = set()
        while len(seen) < K:
            c = int.from_bytes(rng.bytes((d + 7) // 8), "little") & total
            if c:
                seen.add(c)
        chosen = sorted(seen)
    for j in range(d):
        bit = 1 << j
        if any(a & bit for a in chosen):
            continue
        current = set(chosen)
        options = [i for i, a in enumerate(chosen) if (a | bit) not in current]
        i = options[rng.integers(len(options))]
        chosen[i] |= bit
    return LogisticSpec(d=d, subsets=tuple(chosen), w=(float(w),) * K)


def positive_stable(w, rng, size=None):
    """Positive stable variables with Laplace transform ``exp(-t^w)``.

    Kanter's representation: with ``U ~ Unif(0, pi)`` and ``E ~ Exp(1)``,
    ``S = (A(U) / E)^((1-w)/w)`` where
    ``A(u) = sin(w u)^(w/(1-w)) sin((1-w) u) / sin(u)^(1/(1-w))``.
    """
    w = float(w)
    if not 0.0 < w < 1.0:
        raise ParameterError(f"stability index must lie in (0, 1), got {w}")
    return np.exp(_log_positive_stable(w, rng, size))


def _log_positive_stable(w, rng, size):
    u = rng.uniform(0.0, np.pi, size=size)
    e = rng.exponential(size=size)
    log_a = (
        (w / (1.0 - w)) * np.log(np.sin(w * u))
        + np.log(np.sin((1.0 - w) * u))
        - np.log(np.sin(u)) / (1.0 - w)
    )
    return ((1.0 - w) / w) * (log_a - np.log(e))


def sample(spec, n, rng):
    """Draw ``n`` rows from the asymmetric logistic distribution ``spec``."""
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    A = spec.multiplicity.astype(np.float64)
    X = np.zeros((n, spec.d))
    for a, w in zip(spec.subsets, spec.w):
        cols = np.flatnonzero(subsets.to_bool(a, spec.d))
        log_e = np.log(rng.exponential(size=(n, len(cols))))
        if w < 1.0:
            log_s = _log_positive_stable(w, rng, n)
            # Z = (S / E)^w, block CDF exp{-(sum z_j^(-1/w))^w}
            Z = np.exp(w * (log_s[:, None] - log_e))
        else:
            Z = np.exp(-log_e)
        X[:, cols] = np.maximum(X[:, cols], Z / A[cols])
    return X


def glog_cdf(spec, x):
    """Evaluate the joint CDF at one point (length d) or a batch (m, d).

    Coordinates may be ``inf``.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != spec.d:
        raise InvalidInputError(f"expected {spec.d} coordinates, got {x.shape[1]}")
    if np.any(~(x > 0)):
        raise InvalidInputError("CDF arguments must be positive")
    log_ax = np.log(spec.multiplicity * x)
    expo = np.zeros(len(x))
    for a, w in zip(spec.subsets, spec.w):
        cols = subsets.to_bool(a, spec.d)
        # (sum_j (A_j x_j)^(-1/w))^w computed in log space
        with np.errstate(divide="ignore"):
            lse = logsumexp(-log_ax[:, cols] / w, axis=1)
        expo += np.exp(w * lse)
    out = np.exp(-expo)
    return out[0] if single else out


def true_masses(spec):
    """Limit mass of each charged cone, ``(sum_{j in alpha} A_j^(-1/w))^w``."""
    A = spec.multiplicity.astype(np.float64)
    out = {}
    for a, w in zip(spec.subsets, spec.w):
        cols = subsets.to_bool(a, spec.d)
        out[a] = float(np.exp(w * logsumexp(-np.log(A[cols]) / w)))
    return out


def extremal_coefficient(X):
    """Estimate ``theta`` in ``P(max_j X_j <= x) = exp(-theta/x)`` for unit Frechet rows."""
    X = np.asarray(X, dtype=np.float64)
    return 1.0 / np.mean(1.0 / X.max(axis=1))


# -- support recovery ------------------------------------------------------------

@dataclass
class RecoveryReport:
    K: int
    n: int
    d: int
    runs: int
    params: dict
    errors: List[int] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)

    @property
    def mean_errors(self):
        return float(np.mean(self.errors)) if self.errors else float("nan")

    def to_dict(self):
        return {
            "K": self.K,
            "n": self.n,
            "d": self.d,
            "runs": self.runs,
            "params": self.params,
            "errors": list(self.errors),
            "seeds": list(self.seeds),
            "mean_errors": self.mean_errors,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def recovery_errors(true_subsets, estimated_subsets):
    """Size of the symmetric difference between two subset families."""
    return len(set(true_subsets) ^ set(estimated_subsets))


def _recovery_run(args):
    d, K, n, w, params, seed = args
    rng = np.random.default_rng(seed)
    spec = random_support(d, K, rng, w=w)
    X = sample(spec, n, rng)
    model = fit(X, params)
    return recovery_errors(spec.subsets, model.representation.masses)


def worker_count():
    """Worker cap from ``EXTREMIS_THREADS`` (default 1)."""
    raw = os.environ.get("EXTREMIS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ParameterError(f"EXTREMIS_THREADS must be an integer, got {raw!r}")


def support_recovery(d, K, n, runs=20, params=None, seed=0, w=0.1, workers=None):
    """Repeat simulate -> fit -> compare over ``runs`` seeded runs.

    Run ``i`` uses the stream ``default_rng(seed + i)``, so results do not
    depend on ``workers``.
    """
    params = DamexParams() if params is None else params
    workers = worker_count() if workers is None else workers
    seeds = [seed + i for i in range(runs)]
    tasks = [(d, K, n, w, params, s) for s in seeds]
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=min(workers, runs)) as pool:
            errors = list(pool.map(_recovery_run, tasks))
    else:
        errors = [_recovery_run(t) for t in tasks]
    return RecoveryReport(
        K=K,
        n=n,
        d=d,
        runs=runs,
        params={
            "k": params.k,
            "epsilon": params.epsilon,
            "p": params.p,
            "w": w,
            "seed": seed,
        },
        errors=errors,
        seeds=seeds,
    )
