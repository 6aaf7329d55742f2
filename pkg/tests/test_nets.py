import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyckcount.harness import classify_sequence
from dyckcount.languages import dyck, shuffle
from dyckcount.nets import (ARCHITECTURES, BLOCK_ORDER, NetParams, NumericalError, backward, block_shapes,
                            counter_lstm, forward, gradient_check, init_params, initial_state, mse_loss,
                            numerical_gradient, parameter_count, step)
from dyckcount.oracles import depth_profile


def sig(x):
    return 1.0 / (1.0 + np.exp(-x))


def scalar_lstm_by_hand(theta, xs):
    """1-unit LSTM with D=2 and no readout bias, written out scalar by scalar."""
    W_ih = theta[0:8].reshape(4, 2)
    b_ih = theta[8:12]
    W_hh = theta[12:16]
    b_hh = theta[16:20]
    W_y = theta[20:22]
    h = c = 0.0
    ys = []
    for x in xs:
        a = [W_ih[g, x] + b_ih[g] + W_hh[g] * h + b_hh[g] for g in range(4)]
        i, f, g, o = sig(a[0]), sig(a[1]), np.tanh(a[2]), sig(a[3])
        c = f * c + i * g
        h = o * np.tanh(c)
        ys.append([sig(W_y[0] * h), sig(W_y[1] * h)])
    return np.array(ys)


def test_shapes_and_counts():
    assert block_shapes("lstm", 4, 3) == {"W_ih": (12, 4), "b_ih": (12,), "W_hh": (12, 3), "b_hh": (12,),
                                          "W_y": (4, 3)}
    assert parameter_count("rnn", 2, 3) == 3 * 2 + 3 + 9 + 3 + 6
    assert parameter_count("gru", 2, 3, readout_bias=True) == 9 * 2 + 9 + 27 + 9 + 6 + 2
    params = init_params("gru", 2, 3, seed=0, readout_bias=True)
    assert list(params.blocks()) == list(BLOCK_ORDER)
    with pytest.raises(ValueError):
        NetParams("lstm", 2, 3, np.zeros(5))
    with pytest.raises(ValueError):
        init_params("transformer", 2, 3, seed=0)


def test_init_ranges():
    params = init_params("lstm", 4, 4, seed=1)
    b = params.blocks()
    for name in ("W_ih", "W_hh", "W_y"):
        assert np.all(np.abs(b[name]) <= 0.5) and np.any(b[name] != 0)
    assert np.all(b["b_ih"] == 0) and np.all(b["b_hh"] == 0)
    assert np.array_equal(init_params("lstm", 4, 4, seed=1).theta, params.theta)


def test_lstm_matches_scalar_recomputation():
    rng = np.random.default_rng(3)
    params = NetParams("lstm", 2, 1, rng.normal(size=parameter_count("lstm", 2, 1)))
    xs = rng.integers(0, 2, size=15)
    assert np.allclose(forward(params, xs).y, scalar_lstm_by_hand(params.theta, xs), atol=1e-12)


@pytest.mark.parametrize("arch", ARCHITECTURES)
@pytest.mark.parametrize("bias", [False, True])
def test_compiled_forward_matches_step(arch, bias):
    rng = np.random.default_rng(5)
    params = init_params(arch, 4, 3, seed=2, readout_bias=bias)
    params.theta[:] = rng.normal(size=params.theta.shape)
    xs = rng.integers(0, 4, size=12)
    trace = forward(params, xs)
    state = initial_state(params)
    for t, x in enumerate(xs):
        state, y = step(params, np.eye(4)[x], state)
        assert np.allclose(trace.h[t], state.h, atol=1e-12)
        assert np.allclose(trace.y[t], y, atol=1e-12)
        if arch == "lstm":
            assert np.allclose(trace.c[t], state.c, atol=1e-12)
    assert np.allclose(forward(params, np.eye(4)[xs]).y, trace.y)


def test_forward_rejects_bad_inputs():
    params = init_params("rnn", 2, 2, seed=0)
    with pytest.raises(ValueError):
        forward(params, np.zeros((3, 5)))
    with pytest.raises(ValueError):
        forward(params, [0, 2])
    params.theta[0] = np.nan
    with pytest.raises(NumericalError):
        forward(params, [0, 1])


def test_mse_loss():
    assert mse_loss([[0.5, 1.0]], [[1.0, 1.0]]) == pytest.approx(0.125)
    assert mse_loss([[0.5, 1.0]], [[1.0, 0.0]], mask=[[1.0, 0.0]]) == pytest.approx(0.25)
    with pytest.raises(ValueError, match="length mismatch"):
        mse_loss(np.zeros((2, 2)), np.zeros((3, 2)))


@pytest.mark.parametrize("arch,D,H", [("rnn", 2, 3), ("gru", 4, 4), ("lstm", 12, 8)])
def test_gradient_check_examples(arch, D, H):
    report = gradient_check(arch, D, H, trials=2, seed=7)
    assert report.passed, report.max_rel_error


@pytest.mark.parametrize("arch", ARCHITECTURES)
def test_gradient_with_mask_and_readout_bias(arch):
    rng = np.random.default_rng(11)
    params = init_params(arch, 4, 2, seed=1, readout_bias=True)
    params.theta[:] = rng.normal(size=params.theta.shape)
    xs = rng.integers(0, 4, size=6)
    targets = rng.random((6, 4))
    mask = np.zeros((6, 4))
    mask[-1, 2:] = 1.0
    loss, grad = backward(params, xs, targets, mask)
    assert loss == pytest.approx(mse_loss(forward(params, xs).y, targets, mask))
    numeric = numerical_gradient(params, xs, targets, mask)
    assert np.allclose(grad, numeric, rtol=1e-4, atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(ARCHITECTURES), st.integers(1, 3), st.integers(0, 2**31))
def test_gradient_matches_finite_differences(arch, H, seed):
    rng = np.random.default_rng(seed)
    params = init_params(arch, 2, H, seed=seed)
    xs = rng.integers(0, 2, size=int(rng.integers(1, 7)))
    targets = (rng.random((len(xs), 2)) < 0.5).astype(float)
    _, grad = backward(params, xs, targets)
    numeric = numerical_gradient(params, xs, targets)
    err = np.abs(grad - numeric) / np.maximum(np.maximum(np.abs(grad), np.abs(numeric)), 1e-7)
    assert err.max() < 1e-4


def test_hand_set_lstm_counts_depth():
    params = counter_lstm(1)
    s = "((((()))))(()())((()()))()"
    trace = forward(params, [0 if c == "(" else 1 for c in s])
    depth = np.array(depth_profile(s, dyck(1).pairs[0]))
    assert np.max(np.abs(trace.c[:, 0] - depth)) < 0.1
    assert classify_sequence(params, dyck(1), s).accepted


def test_hand_set_lstm_solves_shuffle():
    params = counter_lstm(2)
    s = "([(])[])(([)])[([])]"
    result = classify_sequence(params, shuffle(2), s)
    assert result.accepted
    for j, pair in enumerate(shuffle(2).pairs):
        assert np.max(np.abs(result.trace.c[:, j] - np.array(depth_profile(s, pair)))) < 0.1
