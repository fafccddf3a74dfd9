"""Loss zoo under increasing label noise: a desk-scale sweep.

Runs plain cross-entropy against the adaptive fractional loss over a grid of
symmetric noise rates with shared seeds, then prints the summary the sweep
writes to CSV.  The fractional loss holds its clean-test accuracy while
cross-entropy decays, and its final learned order tracks the noise rate.
"""

import os
import tempfile

from fracloss import experiment as ex
from fracloss.losses import LossSpec
from fracloss.net import OptimizerConfig
from fracloss.noise import NoiseSpec

base = ex.ExperimentConfig()
base.dataset = ex.DatasetSpec(kind="blobs", n=3000, k=4, d=10, separation=3.0, seed=0, test_n=1000)
base.noise = NoiseSpec(kind="symmetric", eta=0.0)
base.loss = LossSpec("fcl", {"mu0": 0.5})
base.mu = ex.MuSettings(lr=0.1, freeze_epochs=5, optimizer="adam")
base.optimizer = OptimizerConfig(lr0=1e-3, weight_decay=1e-4, clip_norm=10.0)
base.model = ex.ModelSettings(hidden=(64, 64))
base.train = ex.TrainSettings(epochs=25, batch_size=64, val_fraction=0.2, eval_test=True)
base.seeds = ex.Seeds(init=1, noise=2, shuffle=3)

etas = (0.0, 0.3, 0.6)
print(f"sweeping losses x etas = {{ce, fcl}} x {etas} ...\n")
results, summary = ex.sweep(base, etas=etas, loss_specs=["ce", "fcl"])

print("run_id        status  val_acc  test_acc  final_mu")
for entry in summary:
    record = results[entry["run_id"]]
    test_acc = record.final["test_acc"] if record else float("nan")
    mu = entry["final_mu"] if entry["final_mu"] is not None else float("nan")
    print(
        f"{entry['run_id']:<13} {entry['status']:<7} {entry['final_val_acc']:.3f}    "
        f"{test_acc:.3f}     {mu:.3f}"
    )

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "summary.csv")
    ex.write_summary_csv(summary, path)
    print("\nsummary.csv contents:")
    with open(path) as f:
        print(f.read().rstrip())
