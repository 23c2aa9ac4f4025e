"""
Recovering the support of an asymmetric logistic model
======================================================

Draw a random family of K feature subsets, simulate from the
corresponding max-stable model and check which subsets the estimator
charges.
"""

import numpy as np

from extremis import DamexParams, fit, subsets
from extremis.simulate import random_support, recovery_errors, sample, true_masses

rng = np.random.default_rng(3)
spec = random_support(d=10, K=5, rng=rng, w=0.1)
X = sample(spec, 50_000, rng)

print("true subsets and limit masses")
for alpha, m in true_masses(spec).items():
    print(" ", subsets.format_subset(alpha), round(m, 3))

###############################################################################
# The cutoff for a "small" coordinate is epsilon * n / k. With the standard
# epsilon = 0.01 and k = sqrt(n) it is barely above 2, so points spill into
# unions of true subsets. Wider rectangles with a firmer threshold fix that.

for eps, p in [(0.01, 0.1), (0.2, 0.5)]:
    model = fit(X, DamexParams(epsilon=eps, p=p))
    found = model.representation.masses
    print(f"epsilon={eps}, p={p}: {len(found)} subsets, "
          f"{recovery_errors(spec.subsets, found)} errors")

###############################################################################
# The same experiment over many seeds, as in the ``recover`` subcommand.

from extremis.simulate import support_recovery

rep = support_recovery(10, 5, 50_000, runs=5, params=DamexParams(epsilon=0.2, p=0.5))
print(rep.errors, rep.mean_errors)
