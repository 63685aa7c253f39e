"""Smoke tests for the addnet Python module (built from the CMake tree)."""

import json
import math
import os
import random
import tempfile

import pytest

import addnet as ad


def test_ef_scalar_forms_agree():
    rng = random.Random(1)
    for _ in range(2000):
        x = rng.uniform(-50, 50)
        y = rng.uniform(-50, 50)
        expected = math.copysign(abs(x) + abs(y), x * y) if x * y != 0 else 0.0
        if x == 0 or y == 0:
            expected = 0.0
        assert ad.ef_term(x, y) == expected
        assert ad.ef_term(x, y) == ad.ef_term_alt(x, y)


def test_ef_dot_l1_identity():
    rng = random.Random(2)
    for _ in range(200):
        x = [rng.uniform(-5, 5) for _ in range(rng.randint(1, 32))]
        assert ad.ef_dot(x, x) == 2.0 * sum(abs(v) for v in x)


def test_ef_matprod_and_counts():
    W = ad.Matrix(2, 2, [3.0, 0.0, -4.0, 1.0])
    assert ad.ef_matprod([1.0, 2.0], W) == [-2.0, 3.0]

    ad.reset_op_counter()
    before = ad.op_counter().mults
    ad.ef_dot([1.0] * 10, [-1.0] * 10)
    assert ad.op_counter().mults == before  # multiplication-free

    pred = ad.theoretical_dense("ef", 784, 300)
    assert pred.mults == 300
    assert ad.theoretical_dense("classic", 784, 300).mults == 235200


def test_rng_determinism():
    a = ad.Rng(7)
    b = ad.Rng(7)
    assert [a.next_u64() for _ in range(8)] == [b.next_u64() for _ in range(8)]


def test_sign_network_exact():
    rng = random.Random(3)
    for _ in range(50):
        y = [rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)]
        bias = rng.uniform(-1, 1)
        x = [rng.uniform(-1, 1) for _ in range(3)]
        t = sum(a * b for a, b in zip(y, x)) + bias
        if abs(t) <= 1e-9:
            continue
        net = ad.build_sign_network(y, bias)
        oracle = 1.0 if t > 0 else -1.0
        assert ad.exact_forward_equals(net, x, [oracle])
        assert math.copysign(1.0, net.forward(x)[0]) == oracle


def test_xor_training_and_checkpoint_roundtrip():
    net, data = ad.build_xor_experiment("ef", seed=1)
    cfg = ad.SgdConfig(lr=0.01, batch_size=4, epochs=300, seed=1)
    trained, history = ad.sgd_train(net, data, data, cfg)
    assert history[-1].train_loss < history[0].train_loss
    acc = ad.evaluate(trained, data)

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "xor.json")
        ad.save_checkpoint(trained, path, {"arch": "xor"})
        loaded, config = ad.load_checkpoint(path)
        assert config["arch"] == "xor"
        assert ad.evaluate(loaded, data) == acc
        with open(path) as f:
            blob = json.load(f)
        assert blob["version"] == 1
        assert blob["operator"] == "ef"


def test_training_determinism():
    net, data = ad.build_xor_experiment("ef", seed=5)
    cfg = ad.SgdConfig(lr=0.01, batch_size=2, epochs=40, seed=11)
    _, h1 = ad.sgd_train(net, data, data, cfg)
    _, h2 = ad.sgd_train(net, data, data, cfg)
    assert [ad.metrics_json_line(m) for m in h1] == [ad.metrics_json_line(m) for m in h2]


def test_idx_roundtrip_and_synth():
    data = ad.synth_digits(64, seed=4)
    assert data.samples.rows == 64
    assert data.samples.cols == 784
    with tempfile.TemporaryDirectory() as tmp:
        img = os.path.join(tmp, "imgs.idx")
        lab = os.path.join(tmp, "labs.idx")
        ad.write_idx_images(img, data.samples, 28, 28)
        ad.write_idx_labels(lab, data.labels)
        m = ad.load_idx_images(img)
        assert m.rows == 64
        assert ad.load_idx_labels(lab) == list(data.labels)
    assert ad.one_hot(3, 10) == [0, 0, 0, 1, 0, 0, 0, 0, 0, 0]


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        ad.ef_dot([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        ad.one_hot(5, 3)
    with pytest.raises(RuntimeError):
        ad.load_idx_images("/nonexistent/file.idx")
