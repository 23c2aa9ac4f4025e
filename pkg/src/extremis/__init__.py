"""Sparse representation of multivariate extremes and DAMEX anomaly scoring."""

from .damex import DamexModel, DamexParams, ScoreRecord, fit, load, save, score, score_batch, score_samples
from .errors import (
    ExtremisError,
    InvalidInputError,
    ModelFormatError,
    ModelVersionError,
    ParameterError,
    UndefinedMetricError,
)
from .ranks import MarginalRanker, fit_margins, standardize_training
from .subcone import (
    DegenerateRegimeWarning,
    SparseAngularRepresentation,
    apply_threshold,
    assign_rectangle,
    dimension_histogram,
    empirical_g,
    empirical_stdf,
    estimate_masses,
)
from .subsets import subset

__version__ = "0.1.0"
