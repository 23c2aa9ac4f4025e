"""
How many features are extreme together?
=======================================

The dimension histogram sums the estimated mass by subset size. Sparse
tail dependence shows up as mass concentrated on small subsets.
"""

import numpy as np

from extremis import DamexParams, fit
from extremis.simulate import LogisticSpec, sample
from extremis.subcone import dimension_histogram
from extremis.subsets import subset

# 8 features in four dependent pairs
spec = LogisticSpec(d=8, subsets=tuple(subset(2 * i + 1, 2 * i + 2) for i in range(4)), w=0.1)
X = sample(spec, 40_000, np.random.default_rng(2))

model = fit(X, DamexParams(epsilon=0.2, p=0.1))
for size, mass in dimension_histogram(model.representation).items():
    print(f"{size} features: {mass:.3f}")

# independent features instead: mass sits mostly on singletons
Y = np.random.default_rng(3).pareto(1.0, size=(40_000, 8))
print(dimension_histogram(fit(Y, DamexParams(epsilon=0.2)).representation))
