"""
Fitting a sparse tail-dependence model and scoring new points
=============================================================

Features 1 and 3 are large together, feature 2 is large on its own.
The fitted representation should charge the subsets {1, 3} and {2}.
"""

import numpy as np

import extremis
from extremis import subsets

rng = np.random.default_rng(0)
n = 20_000
a = rng.pareto(1.0, n) + 1
b = rng.pareto(1.0, n) + 1
X = np.column_stack([a, b, a * rng.uniform(0.8, 1.25, n)])

###############################################################################
# Fit with wide rectangles so the small-coordinate cutoff sits well inside
# the bulk (epsilon * sqrt(n) is about 28 here).

model = extremis.fit(X, extremis.DamexParams(epsilon=0.2, p=0.1))
for alpha, mass in sorted(model.representation.masses.items()):
    print(subsets.format_subset(alpha), round(mass, 3))

###############################################################################
# A joint extreme of features 1 and 3 is normal; a large value of feature 1
# alone has no mass behind it and gets score 0.

probes = np.array([
    [500.0, 1.0, 520.0],
    [500.0, 1.0, 1.0],
    [1.0, 800.0, 1.0],
])
for rec in extremis.score_batch(model, probes):
    print(rec.row, subsets.format_subset(rec.subset), f"{rec.score:.2e}")

###############################################################################
# Models round-trip through JSON.

import io

buf = io.StringIO()
extremis.save(model, buf)
buf.seek(0)
again = extremis.load(buf)
print(extremis.score(again, probes[0]).score == extremis.score(model, probes[0]).score)
