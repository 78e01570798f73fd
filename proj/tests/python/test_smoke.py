"""End-to-end smoke checks for the python bindings."""

import math
import os
import tempfile

import pytest

import lira


def test_env_roundtrip():
    env = lira.Env("point_mass_push", t_max=50, seed=7)
    assert env.state_dim == 4
    assert env.action_dim == 2
    assert env.disturbance_dim == 2
    assert env.reward_dim == 2
    s = env.reset()
    assert len(s) == 4
    ns, r, term, trunc = env.step(s, [0.1, -0.1], [0.0, 0.0], 0)
    assert len(ns) == 4
    assert len(r) == 2
    assert isinstance(term, bool) and isinstance(trunc, bool)
    assert all(math.isfinite(v) for v in ns + r)


def test_chain_env_dims():
    env = lira.Env("chain_crawler", chain_joints=6, t_max=50, seed=3)
    assert env.state_dim == 13  # 6 angles + 6 velocities + last displacement
    assert env.action_dim == 4
    assert env.disturbance_dim == 2


def test_noise_bounds():
    gen = lira.NoiseGen("brown3", dim=2, t_max=100, sigma0=0.2 / 3.0,
                        d_max=1.0, seed=11)
    gen.reset()
    for t in range(100):
        d = gen.emit(t)
        assert len(d) == 2
        assert all(abs(v) <= 1.0 for v in d)


def test_stats():
    assert lira.iqm(list(range(1, 31))) == pytest.approx(15.5)
    mean, ci, kept = lira.aggregate_models([10.0, 10.0, 10.0, 10.0, 10.0])
    assert mean == pytest.approx(10.0)
    assert ci == pytest.approx(0.0)
    assert kept == 3
    assert lira.combined_metric([5.0, 3.0, 1.0], 5.0, 5.0) == pytest.approx(-6.0)
    assert lira.combined_metric([4.0, 1.0, 0.0], 5.0, 4.0) == pytest.approx(-8.0)


def test_default_config_parses():
    text = lira.default_config("point_mass_push", "proposal")
    assert "[experiment]" in text
    assert "mode = proposal" in text


def test_train_eval_cycle():
    cfg = """
[experiment]
env = point_mass_push
mode = nominal
episodes = 2
seed = 1

[env]
t_max = 40

[model]
hidden = 16,16
cond_hidden = 8,8
flow_layers = 1
flow_bins = 4

[adversary]
feature_hidden = 16,16
head_hidden = 8,8
flow_layers = 1
flow_bins = 4

[planner]
candidates = 16
horizon = 6

[eval]
trials = 2
checkpoint_interval = 2
"""
    with tempfile.TemporaryDirectory() as tmp:
        cfg_path = os.path.join(tmp, "cfg.ini")
        with open(cfg_path, "w", encoding="utf-8") as f:
            f.write(cfg)
        out = lira.train(cfg_path, seed=1, out_dir=os.path.join(tmp, "run"))
        assert len(out["returns"]) == 2
        assert os.path.exists(out["checkpoint"])
        res = lira.evaluate(out["checkpoint"], "nominal", trials=2, seed=5)
        assert len(res["returns"]) == 2
        assert math.isfinite(res["iqm"])
