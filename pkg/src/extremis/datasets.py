"""Preprocessing recipes for the public anomaly-detection benchmarks.

Raw files are not bundled. Each recipe reads a comma-separated file with a
header row; pass ``header=False`` for the original header-less
distributions and the canonical column names below are applied.

Column maps
-----------
shuttle
    9 numeric attributes (``time, A2..A9``) and ``class``. Class 4 rows are
    dropped; class 1 is normal, every other class is an anomaly.
forestcover
    54 numeric attributes and ``Cover_Type``. Class 2 is normal, class 4 is
    the anomaly class, other classes are dropped.
SF
    KDD Cup '99 rows with ``logged_in > 0``; features ``duration, service,
    src_bytes, dst_bytes``. Rows whose ``label`` is not ``normal`` are
    anomalies.
http
    The SF rows with ``service == 'http'``; features ``duration, src_bytes,
    dst_bytes``.
SA
    All normal KDD rows plus a uniform 1% subsample (without replacement)
    of the attack rows; all 41 features.

Categorical KDD columns (``protocol_type``, ``service``, ``flag``) become
integer codes ordered by decreasing frequency, ties broken by name.
"""

import numpy as np
import pandas as pd

from .errors import InvalidInputError
from .evaluation import LabeledDataset

KDD_COLUMNS = [
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in",
    "num_compromised", "root_shell", "su_attempted", "num_root",
    "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds",
    "is_host_login", "is_guest_login", "count", "srv_count", "serror_rate",
    "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
    "diff_srv_rate", "srv_diff_host_rate", "dst_host_count", "dst_host_srv_count",
    "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate", "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate", "label",
]
KDD_CATEGORICAL = ["protocol_type", "service", "flag"]
SHUTTLE_COLUMNS = ["time"] + [f"A{i}" for i in range(2, 10)] + ["class"]
FORESTCOVER_COLUMNS = [f"f{i}" for i in range(1, 55)] + ["Cover_Type"]

RECIPES = ("shuttle", "forestcover", "http", "SF", "SA")

_CANONICAL = {
    "shuttle": SHUTTLE_COLUMNS,
    "forestcover": FORESTCOVER_COLUMNS,
    "http": KDD_COLUMNS,
    "SF": KDD_COLUMNS,
    "SA": KDD_COLUMNS,
}


def read_raw(source, recipe, header=True):
    names = None if header else _CANONICAL[recipe]
    try:
        return pd.read_csv(source, header=0 if header else None, names=names,
                           skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise InvalidInputError(f"cannot parse {source}: {exc}") from exc


def _require(df, columns, recipe):
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise InvalidInputError(
            f"recipe {recipe!r}: raw data lacks column(s) {missing}; "
            f"found {list(df.columns)[:10]}{'...' if df.shape[1] > 10 else ''}"
        )


def _numeric(df, columns, recipe):
    try:
        X = df[columns].to_numpy(dtype=np.float64)
    except ValueError as exc:
        raise InvalidInputError(f"recipe {recipe!r}: non-numeric feature values ({exc})") from exc
    if not np.all(np.isfinite(X)):
        raise InvalidInputError(f"recipe {recipe!r}: missing or non-finite feature values")
    return X


def frequency_codes(values):
    """Integer codes by decreasing frequency (0 = most frequent), ties by name."""
    counts = pd.Series(values).astype(str).value_counts()
    order = sorted(counts.index, key=lambda v: (-counts[v], v))
    table = {v: i for i, v in enumerate(order)}
    return np.array([table[v] for v in pd.Series(values).astype(str)], dtype=np.float64)


def _kdd_labels(df):
    lab = df["label"].astype(str).str.strip().str.rstrip(".")
    return (lab != "normal").to_numpy().astype(np.int8)


def _kdd_features(df, columns, recipe):
    out = df[columns].copy()
    for c in columns:
        if c in KDD_CATEGORICAL:
            out[c] = frequency_codes(out[c])
    return _numeric(out, columns, recipe)


def preprocess(recipe, source, header=True, seed=0, anomaly_fraction=0.01):
    """Build a :class:`LabeledDataset` from a raw file (path or buffer) or DataFrame."""
    if recipe not in RECIPES:
        raise InvalidInputError(f"unknown recipe {recipe!r}; choose from {RECIPES}")
    df = source if isinstance(source, pd.DataFrame) else read_raw(source, recipe, header)

    if recipe == "shuttle":
        _require(df, ["class"], recipe)
        df = df[df["class"] != 4]
        features = [c for c in df.columns if c != "class"]
        X = _numeric(df, features, recipe)
        y = (df["class"] != 1).to_numpy().astype(np.int8)
    elif recipe == "forestcover":
        _require(df, ["Cover_Type"], recipe)
        df = df[df["Cover_Type"].isin([2, 4])]
        features = [c for c in df.columns if c != "Cover_Type"]
        X = _numeric(df, features, recipe)
        y = (df["Cover_Type"] == 4).to_numpy().astype(np.int8)
    elif recipe in ("SF", "http"):
        _require(df, ["duration", "service", "src_bytes", "dst_bytes", "logged_in", "label"], recipe)
        df = df[pd.to_numeric(df["logged_in"], errors="coerce") > 0]
        if recipe == "http":
            df = df[df["service"].astype(str).str.strip() == "http"]
            features = ["duration", "src_bytes", "dst_bytes"]
        else:
            features = ["duration", "service", "src_bytes", "dst_bytes"]
        X = _kdd_features(df, features, recipe)
        y = _kdd_labels(df)
    else:  # SA
        _require(df, KDD_COLUMNS, recipe)
        y_all = _kdd_labels(df)
        normal = np.flatnonzero(y_all == 0)
        attacks = np.flatnonzero(y_all == 1)
        rng = np.random.default_rng(seed)
        n_keep = int(round(anomaly_fraction * len(attacks)))
        keep = np.sort(np.r_[normal, rng.choice(attacks, size=n_keep, replace=False)])
        df = df.iloc[keep]
        X = _kdd_features(df, KDD_COLUMNS[:-1], recipe)
        y = y_all[keep]

    if len(y) == 0:
        raise InvalidInputError(f"recipe {recipe!r} selected no rows")
    return LabeledDataset(features=X, labels=y, name=recipe)
