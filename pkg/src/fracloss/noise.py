"""Seeded label-corruption generators with realized-noise reporting.

Corruption is applied per sample with the requested probability rather than
by flipping an exact fraction, so the realized rate fluctuates around the
requested one; `flip_report` records both.
"""

from dataclasses import dataclass, field

import numpy as np

NOISE_KINDS = ("symmetric", "asymmetric_map", "superclass_circular")

# digit flips 7->1, 2->7, 5<->6, 3->8
MNIST_ASYMMETRIC_MAP = ((7, 1), (2, 7), (5, 6), (6, 5), (3, 8))
# truck->automobile, bird->airplane, deer->horse, cat<->dog
CIFAR10_ASYMMETRIC_MAP = ((9, 1), (2, 0), (4, 7), (3, 5), (5, 3))


@dataclass
class NoiseSpec:
    """Declarative corruption process description."""

    kind: str = "symmetric"
    eta: float = 0.0
    pair_map: tuple = field(default_factory=tuple)
    superclass_size: int = 0
    seed: int = 0

    def validate(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if not 0.0 <= float(self.eta) <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.kind == "asymmetric_map":
            _checked_map(self.pair_map)
        if self.kind == "superclass_circular" and self.superclass_size < 2:
            raise ValueError(f"superclass_size must be >= 2, got {self.superclass_size}")
        return self


def _checked_map(pair_map, k=None):
    pairs = [(int(a), int(b)) for a, b in pair_map]
    if not pairs:
        raise ValueError("pair_map must contain at least one (from, to) entry")
    sources = [a for a, _ in pairs]
    if len(set(sources)) != len(sources):
        raise ValueError("pair_map has a duplicated source class")
    for a, b in pairs:
        if a == b:
            raise ValueError(f"pair_map entry {a}->{b} maps a class to itself")
        if a < 0 or b < 0:
            raise ValueError(f"pair_map entry {a}->{b} uses a negative class")
        if k is not None and (a >= k or b >= k):
            raise ValueError(f"pair_map entry {a}->{b} references class >= {k}")
    return pairs


def corrupt_symmetric(labels, k: int, eta: float, seed):
    """Flip each label with probability eta to a uniform choice among the
    other k-1 classes.  Returns (noisy labels, flip mask)."""
    labels = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise ValueError(f"symmetric corruption needs k >= 2, got {k}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    rng = np.random.default_rng(seed)
    fired = rng.random(labels.shape[0]) < eta
    offsets = rng.integers(1, k, size=labels.shape[0])
    noisy = labels.copy()
    noisy[fired] = (labels[fired] + offsets[fired]) % k
    return noisy, fired


def corrupt_asymmetric(labels, pair_map, eta: float, seed, k=None):
    """Flip labels along fixed source->target pairs with probability eta.

    Labels whose class is not a map source are never touched; the mask marks
    samples whose draw fired (all of them change class, since self-maps are
    rejected).
    """
    labels = np.asarray(labels, dtype=np.int64)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    pairs = _checked_map(pair_map, k=k)
    top = max(int(labels.max(initial=0)), max(max(a, b) for a, b in pairs))
    lookup = np.arange(top + 1)
    for a, b in pairs:
        lookup[a] = b
    rng = np.random.default_rng(seed)
    fired = rng.random(labels.shape[0]) < eta
    is_source = np.isin(labels, [a for a, _ in pairs])
    mask = fired & is_source
    noisy = labels.copy()
    noisy[mask] = lookup[labels[mask]]
    return noisy, mask


def corrupt_superclass_circular(labels, k: int, superclass_size: int, eta: float, seed):
    """Within consecutive blocks of ``superclass_size`` classes, flip each
    label to its block successor (wrapping) with probability eta."""
    labels = np.asarray(labels, dtype=np.int64)
    if superclass_size < 2:
        raise ValueError(f"superclass_size must be >= 2, got {superclass_size}")
    if k % superclass_size != 0:
        raise ValueError(f"superclass_size {superclass_size} does not divide k={k}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    rng = np.random.default_rng(seed)
    fired = rng.random(labels.shape[0]) < eta
    block_start = (labels // superclass_size) * superclass_size
    successor = block_start + (labels - block_start + 1) % superclass_size
    noisy = labels.copy()
    noisy[fired] = successor[fired]
    return noisy, fired


def apply_noise(spec: NoiseSpec, labels, k: int):
    """Dispatch a NoiseSpec onto a label array; returns (noisy, mask)."""
    spec.validate()
    if spec.kind == "symmetric":
        return corrupt_symmetric(labels, k, spec.eta, spec.seed)
    if spec.kind == "asymmetric_map":
        return corrupt_asymmetric(labels, spec.pair_map, spec.eta, spec.seed, k=k)
    return corrupt_superclass_circular(labels, k, spec.superclass_size, spec.eta, spec.seed)


def flip_report(clean, noisy, mask, spec: NoiseSpec, k: int) -> dict:
    """JSON-ready summary of a corruption run."""
    clean = np.asarray(clean)
    mask = np.asarray(mask, dtype=bool)
    per_class = np.bincount(clean[mask], minlength=k)
    return {
        "eta_requested": float(spec.eta),
        "eta_realized": float(mask.mean()) if len(mask) else 0.0,
        "per_class_flip_counts": [int(c) for c in per_class],
        "seed": int(spec.seed),
        "kind": spec.kind,
        "n": int(len(mask)),
    }
