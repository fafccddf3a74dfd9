import json

import numpy as np
import pytest

from fracloss import experiment as ex
from fracloss.data import generate_blobs
from fracloss.losses import LossSpec
from fracloss.net import Mlp, OptimizerConfig
from fracloss.noise import NoiseSpec


def tiny_config(loss_kind="fcl", eta=0.0, epochs=8, freeze=2, **loss_params):
    cfg = ex.ExperimentConfig()
    cfg.dataset = ex.DatasetSpec(kind="blobs", n=400, k=3, d=4, separation=3.0, seed=0, test_n=100)
    cfg.noise = NoiseSpec(kind="symmetric", eta=eta)
    params = dict(loss_params)
    if loss_kind in ("fce", "fcl") and "mu0" not in params:
        params["mu0"] = 0.5
    cfg.loss = LossSpec(loss_kind, params)
    cfg.mu = ex.MuSettings(lr=0.1, freeze_epochs=freeze, optimizer="adam")
    cfg.optimizer = OptimizerConfig(lr0=1e-3, weight_decay=0.0, clip_norm=10.0)
    cfg.model = ex.ModelSettings(hidden=(16,))
    cfg.train = ex.TrainSettings(epochs=epochs, batch_size=32, val_fraction=0.2, eval_test=True)
    cfg.seeds = ex.Seeds(init=1, noise=2, shuffle=3)
    return cfg


def test_run_produces_one_row_per_epoch():
    record = ex.run(tiny_config(epochs=6))
    assert len(record.rows) == 6
    assert [row["epoch"] for row in record.rows] == list(range(6))
    for row in record.rows:
        assert 0.0 <= row["train_acc"] <= 1.0
        assert 0.0 <= row["val_acc"] <= 1.0
        assert row["mean_train_loss"] >= 0.0
        assert row["test_acc"] is not None


def test_run_is_deterministic():
    a = ex.run(tiny_config())
    b = ex.run(tiny_config())
    assert a.rows == b.rows
    assert a.config == b.config


def test_mu_frozen_when_freeze_covers_run():
    cfg = tiny_config(epochs=5, freeze=5)
    record = ex.run(cfg)
    assert record.mu_trace == [0.5] * 5


def test_mu_constant_during_freeze_then_moves():
    cfg = tiny_config(eta=0.6, epochs=8, freeze=3)
    record = ex.run(cfg)
    trace = record.mu_trace
    # the value used during an epoch changes first at freeze + 1
    assert trace[: 4] == [0.5] * 4
    assert any(m != 0.5 for m in trace[4:])


def test_mu_free_loss_bypasses_adapter():
    record = ex.run(tiny_config(loss_kind="ce"))
    assert all(m == 0.5 for m in record.mu_trace)
    record = ex.run(tiny_config(loss_kind="sce", alpha=1.0, beta=0.5))
    assert len(set(record.mu_trace)) == 1


def test_learning_beats_chance_on_clean_blobs():
    cfg = tiny_config(epochs=15)
    cfg.optimizer = OptimizerConfig(lr0=0.01, weight_decay=0.0, clip_norm=10.0)
    record = ex.run(cfg)
    assert record.final["val_acc"] > 0.9


def test_corrupt_before_split_flag():
    noisy_val = ex.run(tiny_config(eta=0.9, epochs=1)).final["val_acc"]
    cfg = tiny_config(eta=0.9, epochs=1)
    cfg.train.corrupt_before_split = True
    both_noisy = ex.run(cfg)
    assert both_noisy.final["val_acc"] != noisy_val  # validation labels differ between modes


def test_run_aborts_on_divergence_with_batch_diagnostic():
    cfg = tiny_config(epochs=2)
    cfg.optimizer = OptimizerConfig(lr0=1e160, weight_decay=0.0, clip_norm=1e30)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(ex.ExperimentError, match=r"epoch \d+, batch \d+"):
            ex.run(cfg)


def test_evaluate_tie_break_toward_lowest_class():
    ds = generate_blobs(100, 2, 3, separation=3.0, seed=0)
    model = Mlp((3, 2), seed=0)
    model.layers = [(np.zeros_like(w), np.zeros_like(b)) for w, b in model.layers]
    acc = ex.evaluate(model, ds)
    assert acc == pytest.approx(float((ds.labels == 0).mean()))


def test_evaluate_dimension_mismatch():
    ds = generate_blobs(10, 2, 3, separation=3.0, seed=0)
    with pytest.raises(ValueError):
        ex.evaluate(Mlp((5, 2), seed=0), ds)


def test_record_csv_json_round_trip(tmp_path):
    record = ex.run(tiny_config(epochs=3))
    record.save(tmp_path / "run")
    rows = ex.RunRecord.read_csv(tmp_path / "run" / "record.csv")
    assert len(rows) == 3
    assert rows[0]["epoch"] == 0
    assert rows[2]["mu"] == pytest.approx(record.rows[2]["mu"])
    payload = json.loads((tmp_path / "run" / "record.json").read_text())
    assert payload["config"]["loss"]["kind"] == "fcl"
    assert payload["config"]["loss"]["mu0"] == 0.5
    assert len(payload["rows"]) == 3


def test_sweep_grid_and_summary():
    cfg = tiny_config(epochs=2)
    results, summary = ex.sweep(cfg, etas=[0.0, 0.4], loss_specs=["ce", "fcl"])
    assert len(summary) == 4
    assert set(results) == {"ce_eta0", "ce_eta0.4", "fcl_eta0", "fcl_eta0.4"}
    assert all(entry["status"] == "ok" for entry in summary)


def test_sweep_single_cell_equals_run():
    cfg = tiny_config(epochs=3)
    results, summary = ex.sweep(cfg, etas=[0.2], loss_specs=["fcl"])
    direct_cfg = tiny_config(epochs=3)
    direct_cfg.noise = NoiseSpec(kind="symmetric", eta=0.2)
    direct = ex.run(direct_cfg)
    assert results["fcl_eta0.2"].rows == direct.rows
    assert summary[0]["final_val_acc"] == pytest.approx(direct.final["val_acc"])


def test_sweep_continues_past_failures():
    cfg = tiny_config(epochs=2)
    cfg.optimizer = OptimizerConfig(lr0=1e160, weight_decay=0.0, clip_norm=1e30)
    with np.errstate(over="ignore", invalid="ignore"):
        results, summary = ex.sweep(cfg, etas=[0.0], loss_specs=["fcl", "ce"])
    assert all(entry["status"] == "failed" for entry in summary)
    assert all(rec is None for rec in results.values())
    assert all("epoch" in entry["error"] for entry in summary)


def test_config_from_dict_round_trip_and_validation():
    raw = {
        "dataset": {"kind": "blobs", "n": 200, "k": 3, "d": 4, "separation": 2.5},
        "noise": {"kind": "symmetric", "eta": 0.2},
        "loss": {"kind": "fcl", "mu0": 0.75},
        "mu": {"lr": 0.1, "freeze_epochs": 5},
        "train": {"epochs": 4, "batch_size": 16},
        "seeds": {"init": 1, "noise": 2, "shuffle": 3},
    }
    cfg = ex.ExperimentConfig.from_dict(raw)
    assert cfg.loss.params["mu0"] == 0.75
    assert cfg.to_dict()["loss"]["mu0"] == 0.75
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"unknown_section": {}})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"train": {"epochs": 0}})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"loss": {"kind": "fcl", "mu0": 2.0}})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"dataset": {"banana": 1}})
