"""
Paired sampler comparison on synthetic bearing data
===================================================

The harness regenerates the six health states for each trial, splits
them into 70 normal plus 10 rows per fault for training and 30 rows per
class for testing, and runs every sampler on the same splits. Single
trials vary a lot with the drawn recordings, so differences between
samplers only show up as averages over many paired trials. This takes a
few minutes; the configs directory holds the full experiments.
"""

from dataclasses import replace

from scncel.harness import ExperimentConfig, compare_samplers
from scncel.scn import ScnConfig

cfg = ExperimentConfig(trials=10)
cfg = replace(cfg, classifier=replace(cfg.classifier, scn=ScnConfig(t_max=100, l_max=150)))

comparison = compare_samplers(cfg, ["cloud", "bootstrap", "smote", "none"], write=False)
print("splits shared across samplers:", comparison.paired())
for row in comparison.table():
    print(f"{row['sampler']:>9s}  test {row['test_accuracy_mean']:.3f}  train {row['train_accuracy_mean']:.3f}")
