"""Minimal dense classifier stack: ReLU MLP with a softmax head, trained by
Adam with L2 weight decay, global gradient-norm clipping and a cosine-annealed
learning rate.

The loss side hands back d(loss)/d(probs); `Mlp.backward` pushes that through
the softmax Jacobian and the dense layers, so every loss in the zoo shares a
single backward path.
"""

from dataclasses import dataclass

import numpy as np

CHECKPOINT_VERSION = 1


@dataclass
class OptimizerConfig:
    lr0: float = 1e-3
    weight_decay: float = 0.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float = 10.0
    total_epochs: int = 1

    def __post_init__(self):
        if self.lr0 <= 0.0:
            raise ValueError(f"lr0 must be positive, got {self.lr0}")
        if self.weight_decay < 0.0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.clip_norm <= 0.0:
            raise ValueError(f"clip_norm must be positive, got {self.clip_norm}")
        if self.total_epochs < 1:
            raise ValueError(f"total_epochs must be >= 1, got {self.total_epochs}")


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stabilized by max subtraction."""
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cosine_lr(lr0: float, epoch: int, total_epochs: int) -> float:
    """lr0 * 0.5 * (1 + cos(pi * epoch / total_epochs))."""
    if not 0 <= epoch <= total_epochs:
        raise ValueError(f"epoch {epoch} outside [0, {total_epochs}]")
    return lr0 * 0.5 * (1.0 + float(np.cos(np.pi * epoch / total_epochs)))


class Mlp:
    """Fully connected ReLU network ending in a softmax over k classes."""

    def __init__(self, layer_sizes, seed=0):
        sizes = tuple(int(s) for s in layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError(f"invalid layer sizes {sizes}")
        rng = np.random.default_rng(seed)
        self.layer_sizes = sizes
        self.layers = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / fan_in)
            w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
            b = np.zeros(fan_out)
            self.layers.append((w, b))

    @property
    def n_classes(self) -> int:
        return self.layer_sizes[-1]

    def _check_input(self, x):
        X = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if X.shape[1] != self.layer_sizes[0]:
            raise ValueError(
                f"input dimension {X.shape[1]} does not match model input {self.layer_sizes[0]}"
            )
        return X

    def forward_cache(self, x):
        """Forward pass returning (probs, cache) for a later backward call."""
        X = self._check_input(x)
        activations = [X]
        pre_relu = []
        a = X
        last = len(self.layers) - 1
        for i, (w, b) in enumerate(self.layers):
            z = a @ w.T + b
            if i < last:
                pre_relu.append(z)
                a = np.maximum(z, 0.0)
                activations.append(a)
            else:
                probs = softmax(z)
        return probs, (activations, pre_relu, probs)

    def forward(self, x) -> np.ndarray:
        """Softmax class probabilities; rows sum to 1."""
        probs, _ = self.forward_cache(x)
        return probs if np.ndim(x) == 2 else probs[0]

    def backward(self, cache, grad_p):
        """Batch-mean parameter gradients from d(loss)/d(probs).

        ``grad_p`` holds per-sample gradients with respect to the raw
        probability entries; the softmax Jacobian is applied here.
        """
        activations, pre_relu, probs = cache
        gp = np.atleast_2d(np.asarray(grad_p, dtype=np.float64))
        if gp.shape != probs.shape:
            raise ValueError(f"grad_p shape {gp.shape} does not match probs {probs.shape}")
        gz = probs * (gp - np.sum(gp * probs, axis=1, keepdims=True))
        gz = gz / len(gz)
        grads = [None] * len(self.layers)
        for i in reversed(range(len(self.layers))):
            w, _ = self.layers[i]
            grads[i] = (gz.T @ activations[i], gz.sum(axis=0))
            if i > 0:
                gz = (gz @ w) * (pre_relu[i - 1] > 0.0)
        return grads

    def backprop(self, x, grad_p):
        """Convenience forward + backward for a fresh input."""
        _, cache = self.forward_cache(x)
        return self.backward(cache, grad_p)

    def save(self, path):
        """Write a versioned npz checkpoint (dimensions + row-major arrays)."""
        arrays = {
            "version": np.asarray(CHECKPOINT_VERSION, dtype=np.int64),
            "layer_sizes": np.asarray(self.layer_sizes, dtype=np.int64),
        }
        for i, (w, b) in enumerate(self.layers):
            arrays[f"w{i}"] = w
            arrays[f"b{i}"] = b
        np.savez(path, **arrays)

    @classmethod
    def load(cls, path) -> "Mlp":
        with np.load(path) as data:
            version = int(data["version"])
            if version != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {version}")
            sizes = tuple(int(s) for s in data["layer_sizes"])
            model = cls(sizes, seed=0)
            model.layers = [
                (np.array(data[f"w{i}"]), np.array(data[f"b{i}"]))
                for i in range(len(sizes) - 1)
            ]
        return model


class AdamState:
    """First/second moment buffers matching a model's parameter list."""

    def __init__(self, model: Mlp):
        self.m = [(np.zeros_like(w), np.zeros_like(b)) for w, b in model.layers]
        self.v = [(np.zeros_like(w), np.zeros_like(b)) for w, b in model.layers]
        self.t = 0


def global_grad_norm(grads) -> float:
    total = 0.0
    for gw, gb in grads:
        total += float((gw**2).sum() + (gb**2).sum())
    return float(np.sqrt(total))


def clip_gradients(grads, clip_norm: float):
    """Scale all gradients so the global L2 norm is at most clip_norm."""
    norm = global_grad_norm(grads)
    if norm > clip_norm:
        scale = clip_norm / norm
        grads = [(gw * scale, gb * scale) for gw, gb in grads]
    return grads, norm


def clip_and_step(model: Mlp, grads, config: OptimizerConfig, lr: float,
                  state: AdamState):
    """Clip the global gradient norm, then one Adam step with L2 decay.

    Updates the model parameters and optimizer state in place.
    """
    for gw, gb in grads:
        if not (np.isfinite(gw).all() and np.isfinite(gb).all()):
            raise ValueError("non-finite gradient passed to clip_and_step")
    grads, _ = clip_gradients(grads, config.clip_norm)
    state.t += 1
    bc1 = 1.0 - config.beta1**state.t
    bc2 = 1.0 - config.beta2**state.t
    for i, ((w, b), (gw, gb)) in enumerate(zip(model.layers, grads)):
        mw, mb = state.m[i]
        vw, vb = state.v[i]
        for param, grad, mom1, mom2 in ((w, gw, mw, vw), (b, gb, mb, vb)):
            g = grad + config.weight_decay * param
            mom1 *= config.beta1
            mom1 += (1.0 - config.beta1) * g
            mom2 *= config.beta2
            mom2 += (1.0 - config.beta2) * g**2
            param -= lr * (mom1 / bc1) / (np.sqrt(mom2 / bc2) + config.eps)
