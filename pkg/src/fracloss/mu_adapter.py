"""Epoch-level controller for the learnable fractional order.

The order stays fixed while an epoch runs; per-batch mean gradients are
accumulated and a single projected optimizer step happens at the epoch
boundary, after an initial warm-freeze period.  The step uses the epoch
mean of the accumulated batch means, so its size does not scale with the
number of batches.
"""

import math


class MuState:
    """Learnable fractional order with its accumulator and update policy."""

    def __init__(self, mu0=0.5, lr_mu=0.1, freeze_epochs=5, optimizer="adam",
                 beta1=0.9, beta2=0.999, eps=1e-8):
        mu0 = float(mu0)
        if not 0.0 <= mu0 <= 1.0:
            raise ValueError(f"mu0 must lie in [0, 1], got {mu0}")
        if lr_mu <= 0.0:
            raise ValueError(f"lr_mu must be positive, got {lr_mu}")
        if freeze_epochs < 0:
            raise ValueError(f"freeze_epochs must be >= 0, got {freeze_epochs}")
        if optimizer not in ("adam", "sgd"):
            raise ValueError(f"optimizer must be 'adam' or 'sgd', got {optimizer!r}")
        self.mu = mu0
        self.lr_mu = float(lr_mu)
        self.freeze_epochs = int(freeze_epochs)
        self.optimizer = optimizer
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.acc_grad = 0.0
        self.batches_seen = 0
        self.epoch = 0
        self.m = 0.0
        self.v = 0.0
        self.t = 0

    def accumulate(self, batch_mean_grad_mu):
        """Add one batch-mean gradient to the epoch accumulator."""
        g = float(batch_mean_grad_mu)
        if not math.isfinite(g):
            raise ValueError(f"non-finite mu gradient: {g}")
        self.acc_grad += g
        self.batches_seen += 1
        return self

    def epoch_update(self):
        """Apply the once-per-epoch update and reset the accumulator.

        During the warm-freeze the order is left untouched (the optimizer
        moments do not advance either); afterwards one step on the epoch
        mean gradient runs, projected back into [0, 1].
        """
        if self.batches_seen == 0:
            raise RuntimeError("epoch_update called with no accumulated batches")
        mean_grad = self.acc_grad / self.batches_seen
        if self.epoch >= self.freeze_epochs:
            if self.optimizer == "sgd":
                step = self.lr_mu * mean_grad
            else:
                self.t += 1
                self.m = self.beta1 * self.m + (1.0 - self.beta1) * mean_grad
                self.v = self.beta2 * self.v + (1.0 - self.beta2) * mean_grad**2
                m_hat = self.m / (1.0 - self.beta1**self.t)
                v_hat = self.v / (1.0 - self.beta2**self.t)
                step = self.lr_mu * m_hat / (math.sqrt(v_hat) + self.eps)
            self.mu = min(1.0, max(0.0, self.mu - step))
        self.acc_grad = 0.0
        self.batches_seen = 0
        self.epoch += 1
        return self
