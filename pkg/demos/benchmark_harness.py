"""
Evaluating scores on the extreme region
=======================================

A labelled toy dataset: normal rows are a comonotone cloud, anomalies are
huge in feature 1 while feature 2 stays small. Only test rows whose radius
exceeds sqrt(n_train) are scored.
"""

import numpy as np

from extremis import DamexParams
from extremis.evaluation import LabeledDataset, pr_auc, roc_auc, run_benchmark

rng = np.random.default_rng(1)
t = rng.pareto(1.0, 3000) + 1
normal = np.column_stack([t, t * rng.uniform(0.9, 1.1, 3000)])
anom = np.column_stack([rng.uniform(1e4, 1e5, 40), rng.uniform(0, 1, 40)])
data = LabeledDataset(
    np.vstack([normal, anom]),
    np.r_[np.zeros(3000, int), np.ones(40, int)],
    name="toy",
)

report = run_benchmark(data, DamexParams(epsilon=0.1), runs=10, seed=0)
print("extreme test rows per run:", report.n_extreme)
print("anomaly share among them:", round(report.anomaly_rate_extreme, 3))
print("ROC AUC", report.roc_auc, "PR AUC", report.pr_auc)

###############################################################################
# Both metrics take abnormality scores (larger = more abnormal) and treat
# tied scores as one block.

print(roc_auc([3, 1, 2], [1, 0, 0]), pr_auc([3, 2, 1], [1, 0, 1]))
