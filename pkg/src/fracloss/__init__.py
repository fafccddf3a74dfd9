"""Robust-loss laboratory built around a fractional-order classification loss.

The fractional order mu interpolates the training objective between a
fast-converging cross-entropy-like shape (mu = 0) and a label-noise-robust
mean-absolute-error-like shape (mu = 1), and is itself learned during
training from its own gradient.  The package bundles the loss zoo, a
minimal numpy MLP trainer, seeded label-noise injectors, and an experiment
harness with a CSV/JSON trail.
"""

from . import cli, data, experiment, losses, mu_adapter, net, noise, specialfn, verify
from .experiment import ExperimentConfig, RunRecord, evaluate, run, sweep
from .losses import LossEval, LossSpec, apl_combine, batch_eval, beta_equivalent, ce, fce, fcl, gce, mae, nce, rce
from .mu_adapter import MuState
from .net import AdamState, Mlp, OptimizerConfig, cosine_lr
from .noise import NoiseSpec

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ExperimentConfig",
    "LossEval",
    "LossSpec",
    "Mlp",
    "MuState",
    "NoiseSpec",
    "OptimizerConfig",
    "RunRecord",
    "apl_combine",
    "batch_eval",
    "beta_equivalent",
    "ce",
    "cli",
    "cosine_lr",
    "data",
    "evaluate",
    "experiment",
    "fce",
    "fcl",
    "gce",
    "losses",
    "mae",
    "mu_adapter",
    "nce",
    "net",
    "noise",
    "rce",
    "run",
    "specialfn",
    "sweep",
    "verify",
]
