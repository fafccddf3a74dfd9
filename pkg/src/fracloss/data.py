"""Dataset construction and batching: synthetic Gaussian blobs, the classic
big-endian IDX image/label format, deterministic splits and seeded
mini-batch iteration.  Features always live in [0, 1]."""

import struct
from dataclasses import dataclass

import numpy as np

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


class IdxError(ValueError):
    """Malformed IDX input."""


class IdxMagicError(IdxError):
    pass


class IdxTruncatedError(IdxError):
    pass


class IdxCountMismatchError(IdxError):
    pass


@dataclass
class Dataset:
    features: np.ndarray  # (n, d) float64
    labels: np.ndarray    # (n,) int64
    k: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[0] == 0:
            raise ValueError(f"features must be a non-empty (n, d) array, got {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels must be a vector matching the feature rows")
        if not np.isfinite(self.features).all():
            raise ValueError("features contain non-finite values")
        if self.labels.min() < 0 or self.labels.max() >= self.k:
            raise ValueError(f"labels must lie in [0, {self.k})")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.k)

    def with_labels(self, labels) -> "Dataset":
        return Dataset(self.features, labels, self.k)


@dataclass
class SplitSpec:
    val_fraction: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError(f"val_fraction must lie in (0, 1), got {self.val_fraction}")


def generate_blobs(n: int, k: int, d: int, separation: float, seed=0) -> Dataset:
    """Balanced unit-variance Gaussian clusters, scaled into [0, 1].

    Cluster means sit on scaled basis directions (or on a circle in the
    first two dimensions when k > d); the map into [0, 1] is a fixed affine
    transform of the mean geometry, so datasets drawn with different seeds
    share one coordinate system.
    """
    if k < 2 or n < k or d < 2 or separation <= 0:
        raise ValueError(f"invalid blob parameters n={n} k={k} d={d} separation={separation}")
    rng = np.random.default_rng(seed)
    means = np.zeros((k, d))
    if k <= d:
        means[np.arange(k), np.arange(k)] = separation
    else:
        angles = 2.0 * np.pi * np.arange(k) / k
        means[:, 0] = separation * np.cos(angles)
        means[:, 1] = separation * np.sin(angles)
    counts = np.full(k, n // k)
    counts[: n % k] += 1
    labels = np.repeat(np.arange(k), counts)
    features = means[labels] + rng.standard_normal((n, d))
    lo = means.min() - 4.5
    hi = means.max() + 4.5
    features = np.clip((features - lo) / (hi - lo), 0.0, 1.0)
    order = rng.permutation(n)
    return Dataset(features[order], labels[order], k)


def _read_exact(handle, nbytes, path):
    buf = handle.read(nbytes)
    if len(buf) != nbytes:
        raise IdxTruncatedError(f"{path}: file truncated (wanted {nbytes} bytes, got {len(buf)})")
    return buf


def read_idx(images_path, labels_path) -> Dataset:
    """Parse an IDX image/label pair into a Dataset with pixels in [0, 1]."""
    with open(images_path, "rb") as f:
        magic, n_images, rows, cols = struct.unpack(">IIII", _read_exact(f, 16, images_path))
        if magic != IDX_IMAGES_MAGIC:
            raise IdxMagicError(f"{images_path}: bad magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}")
        pixels = np.frombuffer(_read_exact(f, n_images * rows * cols, images_path), dtype=np.uint8)
    labels = read_idx_labels(labels_path)
    if labels.shape[0] != n_images:
        raise IdxCountMismatchError(
            f"{images_path} holds {n_images} images but {labels_path} holds {labels.shape[0]} labels"
        )
    features = pixels.reshape(n_images, rows * cols).astype(np.float64) / 255.0
    return Dataset(features, labels, int(labels.max()) + 1)


def read_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic, count = struct.unpack(">II", _read_exact(f, 8, path))
        if magic != IDX_LABELS_MAGIC:
            raise IdxMagicError(f"{path}: bad magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}")
        raw = _read_exact(f, count, path)
    return np.frombuffer(raw, dtype=np.uint8).astype(np.int64)


def write_idx_labels(path, labels):
    labels = np.asarray(labels)
    if labels.min(initial=0) < 0 or labels.max(initial=0) > 255:
        raise ValueError("IDX labels must fit in an unsigned byte")
    with open(path, "wb") as f:
        f.write(struct.pack(">II", IDX_LABELS_MAGIC, labels.shape[0]))
        f.write(labels.astype(np.uint8).tobytes())


def write_idx(ds: Dataset, images_path, labels_path, rows: int, cols: int):
    """Quantize features in [0, 1] to bytes and emit an IDX pair."""
    if rows * cols != ds.d:
        raise ValueError(f"rows*cols = {rows * cols} does not match feature dimension {ds.d}")
    pixels = np.round(np.clip(ds.features, 0.0, 1.0) * 255.0).astype(np.uint8)
    with open(images_path, "wb") as f:
        f.write(struct.pack(">IIII", IDX_IMAGES_MAGIC, ds.n, rows, cols))
        f.write(pixels.tobytes())
    write_idx_labels(labels_path, ds.labels)


def split(ds: Dataset, spec: SplitSpec):
    """Disjoint (train, val) partition with |val| = round(n * val_fraction)."""
    n_val = int(round(ds.n * spec.val_fraction))
    if n_val == 0 or n_val == ds.n:
        raise ValueError(f"split of {ds.n} samples at fraction {spec.val_fraction} leaves an empty side")
    perm = np.random.default_rng(spec.seed).permutation(ds.n)
    return ds.subset(perm[n_val:]), ds.subset(perm[:n_val])


def batches(ds: Dataset, batch_size: int, epoch_seed):
    """Seeded shuffle then contiguous index slices; the final partial batch
    is kept, so every index appears exactly once."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    perm = np.random.default_rng(epoch_seed).permutation(ds.n)
    return [perm[i:i + batch_size] for i in range(0, ds.n, batch_size)]


def to_csv(ds: Dataset, path):
    """Plain CSV export: header row, one feature column per dimension,
    label column last."""
    with open(path, "w") as f:
        f.write(",".join([f"f{j}" for j in range(ds.d)] + ["label"]) + "\n")
        for row, label in zip(ds.features, ds.labels):
            f.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")
