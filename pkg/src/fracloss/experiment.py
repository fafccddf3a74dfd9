"""End-to-end training orchestration: noise injection, the epoch loop with
per-batch parameter updates and once-per-epoch fractional-order updates,
metric recording and CSV/JSON export.

A run is single-threaded and fully determined by its config (three seeds:
parameter init, noise draw, shuffling); identical configs produce
byte-identical records.
"""

import copy
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import data as data_mod
from . import losses as losses_mod
from . import net as net_mod
from . import noise as noise_mod
from .mu_adapter import MuState

RECORD_COLUMNS = ("epoch", "mean_train_loss", "train_acc", "val_acc", "test_acc", "mu", "lr")


class ConfigError(ValueError):
    """Bad experiment configuration, with the offending field in the message."""


class ExperimentError(RuntimeError):
    """A run aborted mid-training (for example on a non-finite loss)."""


@dataclass
class DatasetSpec:
    kind: str = "blobs"
    n: int = 1000
    k: int = 4
    d: int = 10
    separation: float = 3.0
    seed: int = 0
    test_n: int = 0
    images: str = ""
    labels: str = ""
    test_images: str = ""
    test_labels: str = ""

    def validate(self):
        if self.kind not in ("blobs", "idx"):
            raise ConfigError(f"dataset.kind must be 'blobs' or 'idx', got {self.kind!r}")
        if self.kind == "idx" and (not self.images or not self.labels):
            raise ConfigError("dataset.kind 'idx' requires dataset.images and dataset.labels")
        return self


@dataclass
class MuSettings:
    lr: float = 0.1
    freeze_epochs: int = 5
    optimizer: str = "adam"


@dataclass
class ModelSettings:
    hidden: tuple = (32,)


@dataclass
class TrainSettings:
    epochs: int = 10
    batch_size: int = 32
    val_fraction: float = 0.2
    corrupt_before_split: bool = False
    eval_test: bool = False

    def validate(self):
        if self.epochs < 1:
            raise ConfigError(f"train.epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"train.batch_size must be >= 1, got {self.batch_size}")
        return self


@dataclass
class Seeds:
    init: int = 0
    noise: int = 1
    shuffle: int = 2


@dataclass
class ExperimentConfig:
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    noise: noise_mod.NoiseSpec = field(default_factory=noise_mod.NoiseSpec)
    loss: losses_mod.LossSpec = field(default_factory=lambda: losses_mod.LossSpec("fcl"))
    mu: MuSettings = field(default_factory=MuSettings)
    optimizer: net_mod.OptimizerConfig = field(default_factory=net_mod.OptimizerConfig)
    model: ModelSettings = field(default_factory=ModelSettings)
    train: TrainSettings = field(default_factory=TrainSettings)
    seeds: Seeds = field(default_factory=Seeds)
    output_dir: str = "runs"

    def validate(self):
        self.dataset.validate()
        self.noise.validate()
        try:
            self.loss.validate()
        except ValueError as exc:
            raise ConfigError(f"loss: {exc}") from exc
        self.train.validate()
        return self

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        known = {f.name for f in fields(cls)}
        for key in raw:
            if key not in known:
                raise ConfigError(f"unknown config section {key!r}")
        cfg = cls(
            dataset=_build(DatasetSpec, raw.get("dataset"), "dataset"),
            noise=_build_noise(raw.get("noise")),
            loss=_build_loss(raw.get("loss")),
            mu=_build(MuSettings, raw.get("mu"), "mu"),
            optimizer=_build(net_mod.OptimizerConfig, raw.get("optimizer"), "optimizer"),
            model=_build(ModelSettings, raw.get("model"), "model"),
            train=_build(TrainSettings, raw.get("train"), "train"),
            seeds=_build(Seeds, raw.get("seeds"), "seeds"),
            output_dir=str(raw.get("output_dir", "runs")),
        )
        return cfg.validate()

    def to_dict(self) -> dict:
        out = asdict(self)
        out["loss"] = self.loss.to_dict()
        out["model"] = {"hidden": [int(h) for h in self.model.hidden]}
        out["noise"]["pair_map"] = [list(p) for p in self.noise.pair_map]
        return out

    def run_id(self) -> str:
        return (
            f"{self.loss.kind}_{self.noise.kind}_eta{self.noise.eta:g}_s{self.seeds.init}"
        )


def _build(cls, section, path):
    section = dict(section or {})
    names = {f.name for f in fields(cls)}
    for key in section:
        if key not in names:
            raise ConfigError(f"{path}.{key}: unknown field")
    if "hidden" in section:
        section["hidden"] = tuple(int(h) for h in section["hidden"])
    try:
        return cls(**section)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _build_noise(section) -> noise_mod.NoiseSpec:
    spec = _build(noise_mod.NoiseSpec, section, "noise")
    spec.pair_map = tuple((int(a), int(b)) for a, b in spec.pair_map)
    return spec


def _build_loss(section) -> losses_mod.LossSpec:
    section = dict(section or {})
    kind = section.pop("kind", "fcl")
    return losses_mod.LossSpec(kind=kind, params=section)


@dataclass
class RunRecord:
    """Per-epoch training trace plus the config that produced it."""

    rows: list
    config: dict

    @property
    def mu_trace(self):
        return [row["mu"] for row in self.rows]

    @property
    def final(self) -> dict:
        return self.rows[-1]

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write(",".join(RECORD_COLUMNS) + "\n")
            for row in self.rows:
                cells = []
                for col in RECORD_COLUMNS:
                    val = row[col]
                    if val is None:
                        cells.append("")
                    elif col == "epoch":
                        cells.append(str(int(val)))
                    else:
                        cells.append(repr(float(val)))
                f.write(",".join(cells) + "\n")

    def to_json(self, path):
        with open(path, "w") as f:
            json.dump({"config": self.config, "rows": self.rows}, f, indent=2)
            f.write("\n")

    def save(self, run_dir):
        os.makedirs(run_dir, exist_ok=True)
        self.to_csv(os.path.join(run_dir, "record.csv"))
        self.to_json(os.path.join(run_dir, "record.json"))

    @staticmethod
    def read_csv(path) -> list:
        rows = []
        with open(path) as f:
            header = f.readline().strip().split(",")
            for line in f:
                cells = line.strip().split(",")
                row = {}
                for col, cell in zip(header, cells):
                    if cell == "":
                        row[col] = None
                    elif col == "epoch":
                        row[col] = int(cell)
                    else:
                        row[col] = float(cell)
                rows.append(row)
        return rows


def evaluate(model: net_mod.Mlp, ds: data_mod.Dataset) -> float:
    """Fraction of samples whose argmax prediction matches the label; ties
    resolve toward the lowest class index."""
    if ds.d != model.layer_sizes[0]:
        raise ValueError(f"dataset dimension {ds.d} does not match model input {model.layer_sizes[0]}")
    probs = model.forward_cache(ds.features)[0]
    return float((probs.argmax(axis=1) == ds.labels).mean())


def _load_datasets(spec: DatasetSpec):
    if spec.kind == "blobs":
        train_pool = data_mod.generate_blobs(spec.n, spec.k, spec.d, spec.separation, seed=spec.seed)
        test = None
        if spec.test_n > 0:
            test = data_mod.generate_blobs(
                spec.test_n, spec.k, spec.d, spec.separation, seed=spec.seed + 1
            )
        return train_pool, test
    train_pool = data_mod.read_idx(spec.images, spec.labels)
    test = None
    if spec.test_images and spec.test_labels:
        test = data_mod.read_idx(spec.test_images, spec.test_labels)
    return train_pool, test


def run(config: ExperimentConfig) -> RunRecord:
    """Execute one training run and return its per-epoch record.

    Structure per epoch: for every mini-batch, forward, loss, backprop and a
    clipped Adam step on the network; batch-mean order gradients accumulate
    on the side and a single projected update of the fractional order runs
    at the epoch boundary (after the warm-freeze).  Train loss/accuracy are
    running means over the epoch's batches; validation (and optionally test)
    accuracy is computed with the post-epoch parameters.
    """
    config.validate()
    train_pool, test = _load_datasets(config.dataset)
    noise_spec = replace(config.noise, seed=config.seeds.noise)
    split_spec = data_mod.SplitSpec(config.train.val_fraction, seed=config.seeds.shuffle)

    if config.train.corrupt_before_split:
        noisy_labels, _ = noise_mod.apply_noise(noise_spec, train_pool.labels, train_pool.k)
        train, val = data_mod.split(train_pool.with_labels(noisy_labels), split_spec)
    else:
        train, val = data_mod.split(train_pool, split_spec)
        noisy_labels, _ = noise_mod.apply_noise(noise_spec, train.labels, train.k)
        train = train.with_labels(noisy_labels)

    layer_sizes = (train.d, *config.model.hidden, train.k)
    model = net_mod.Mlp(layer_sizes, seed=config.seeds.init)
    adam = net_mod.AdamState(model)
    opt = replace(config.optimizer, total_epochs=config.train.epochs)

    mu0 = float(config.loss.params.get("mu0", 0.5))
    mu_state = None
    if losses_mod.is_mu_parametric(config.loss):
        mu_state = MuState(
            mu0=mu0,
            lr_mu=config.mu.lr,
            freeze_epochs=config.mu.freeze_epochs,
            optimizer=config.mu.optimizer,
        )

    rows = []
    for epoch in range(config.train.epochs):
        lr = net_mod.cosine_lr(opt.lr0, epoch, config.train.epochs)
        mu_now = mu_state.mu if mu_state is not None else mu0
        loss_sum = 0.0
        correct = 0
        seen = 0
        for batch_idx, idx in enumerate(
            data_mod.batches(train, config.train.batch_size, [config.seeds.shuffle, epoch])
        ):
            X = train.features[idx]
            yb = train.labels[idx]
            probs, cache = model.forward_cache(X)
            values, grad_p, grad_mu = losses_mod.batch_eval(config.loss, probs, yb, mu=mu_now)
            batch_mean = float(values.mean())
            if not np.isfinite(batch_mean):
                raise ExperimentError(f"non-finite loss at epoch {epoch}, batch {batch_idx}")
            grads = model.backward(cache, grad_p)
            net_mod.clip_and_step(model, grads, opt, lr, adam)
            if mu_state is not None:
                mu_state.accumulate(float(grad_mu.mean()))
            loss_sum += float(values.sum())
            correct += int((probs.argmax(axis=1) == yb).sum())
            seen += len(idx)
        row = {
            "epoch": epoch,
            "mean_train_loss": loss_sum / seen,
            "train_acc": correct / seen,
            "val_acc": evaluate(model, val),
            "test_acc": evaluate(model, test) if (config.train.eval_test and test is not None) else None,
            "mu": mu_now,
            "lr": lr,
        }
        rows.append(row)
        if mu_state is not None:
            mu_state.epoch_update()
    return RunRecord(rows, config.to_dict())


def sweep(base: ExperimentConfig, etas, loss_specs):
    """Cartesian grid of runs over noise rates and losses with shared seeds.

    Returns (results, summary) where results maps run_id to a RunRecord (or
    None for failed cells) and summary is a list of per-cell dicts.  Failing
    cells are marked and the grid continues.
    """
    etas = list(etas)
    loss_specs = [losses_mod._as_spec(s) for s in loss_specs]
    if not etas or not loss_specs:
        raise ValueError("sweep needs at least one eta and one loss")
    results = {}
    summary = []
    for spec in loss_specs:
        for eta in etas:
            cfg = copy.deepcopy(base)
            cfg.loss = copy.deepcopy(spec)
            cfg.noise = replace(cfg.noise, eta=float(eta))
            run_id = f"{spec.kind}_eta{eta:g}"
            entry = {"run_id": run_id, "loss": spec.kind, "eta": float(eta)}
            try:
                record = run(cfg)
                entry.update(
                    status="ok",
                    final_val_acc=record.final["val_acc"],
                    final_mu=record.final["mu"],
                    error="",
                )
                results[run_id] = record
            except Exception as exc:  # continue-and-mark: one bad cell must not kill the grid
                entry.update(status="failed", final_val_acc=None, final_mu=None, error=str(exc))
                results[run_id] = None
            summary.append(entry)
    return results, summary


def write_summary_csv(summary, path):
    cols = ("run_id", "loss", "eta", "status", "final_val_acc", "final_mu", "error")
    with open(path, "w") as f:
        f.write(",".join(cols) + "\n")
        for entry in summary:
            cells = []
            for col in cols:
                val = entry[col]
                if val is None:
                    cells.append("")
                elif isinstance(val, float):
                    cells.append(repr(val))
                else:
                    cells.append(str(val).replace(",", ";"))
            f.write(",".join(cells) + "\n")
