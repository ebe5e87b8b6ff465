import json

import numpy as np
import pytest

from quadbench.nn import (
    AdamState,
    DenseNet,
    GaussianHead,
    adam_step,
    load_policy_checkpoint,
    save_policy_checkpoint,
)


def test_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(123)
    net = DenseNet([48, 512, 256, 128, 12], rng=rng)
    head = GaussianHead(12)
    head.log_std[...] = rng.standard_normal(12)
    state = AdamState.for_params(net.parameters())
    grads = [rng.standard_normal(p.shape) for p in net.parameters()]
    adam_step(net.parameters(), grads, state, lr=1e-3)

    path = tmp_path / "net.ckpt"
    save_policy_checkpoint(path, net, head=head, adam=state)
    net2, head2, adam2, _ = load_policy_checkpoint(path)

    assert net2.layer_sizes == net.layer_sizes
    for a, b in zip(net.parameters(), net2.parameters()):
        assert np.array_equal(a, b)
    assert np.array_equal(head.log_std, head2.log_std)
    assert adam2.step_count == 1
    for a, b in zip(state.first_moment, adam2.first_moment):
        assert np.array_equal(a, b)
    for a, b in zip(state.second_moment, adam2.second_moment):
        assert np.array_equal(a, b)


def test_double_round_trip_identical_bytes(tmp_path):
    net = DenseNet([4, 8, 3], rng=np.random.default_rng(1))
    p1 = tmp_path / "a.ckpt"
    p2 = tmp_path / "b.ckpt"
    save_policy_checkpoint(p1, net)
    net2, _, _, _ = load_policy_checkpoint(p1)
    save_policy_checkpoint(p2, net2)
    assert p1.read_bytes() == p2.read_bytes()


def test_checkpoint_is_self_describing_json(tmp_path):
    net = DenseNet([4, 8, 3], rng=np.random.default_rng(1))
    path = tmp_path / "net.ckpt"
    save_policy_checkpoint(path, net, head=GaussianHead(3))
    doc = json.loads(path.read_text())
    assert doc["format_version"] == 1
    assert doc["layer_sizes"] == [4, 8, 3]
    assert doc["activation"] == "elu"
    assert len(doc["layers"]) == 2
    assert "log_std" in doc


def test_corrupt_checkpoint_rejected(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_text("{not json")
    with pytest.raises(ValueError, match="corrupt"):
        load_policy_checkpoint(path)


def test_unknown_format_version_rejected(tmp_path):
    path = tmp_path / "v9.ckpt"
    path.write_text(json.dumps({"format_version": 9}))
    with pytest.raises(ValueError, match="format_version"):
        load_policy_checkpoint(path)
