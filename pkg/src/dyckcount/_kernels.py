"""Compiled forward/backward passes for one sequence.

Inputs are alphabet indices (the one-hot product ``W_ih @ x`` is a column
lookup).  Gate blocks are stacked row-wise: GRU ``r, z, n``; LSTM ``i, f, g, o``.
Loss is ``sum(mask * (y - target)**2) / sum(mask)``.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def _readout(W_y, b_y, h, y):
    D, H = W_y.shape
    for d in range(D):
        z = b_y[d]
        for j in range(H):
            z += W_y[d, j] * h[j]
        y[d] = _sigmoid(z)


@njit(cache=True)
def _preact(W_ih, b_ih, W_hh, b_hh, x, h, out):
    G, H = W_hh.shape
    for r in range(G):
        a = W_ih[r, x] + b_ih[r] + b_hh[r]
        for j in range(H):
            a += W_hh[r, j] * h[j]
        out[r] = a


@njit(cache=True)
def _loss_and_dz(ys, targets, mask):
    T, D = ys.shape
    norm = 0.0
    for t in range(T):
        for d in range(D):
            norm += mask[t, d]
    dz = np.zeros((T, D))
    loss = 0.0
    if norm == 0.0:
        return loss, dz
    for t in range(T):
        for d in range(D):
            e = ys[t, d] - targets[t, d]
            loss += mask[t, d] * e * e
            dz[t, d] = 2.0 * mask[t, d] * e / norm * ys[t, d] * (1.0 - ys[t, d])
    return loss / norm, dz


@njit(cache=True)
def _readout_backward(W_y, dz_t, h, gW_y, gb_y, dh):
    D, H = W_y.shape
    for d in range(D):
        gb_y[d] += dz_t[d]
        for j in range(H):
            gW_y[d, j] += dz_t[d] * h[j]
            dh[j] += W_y[d, j] * dz_t[d]


@njit(cache=True)
def _input_backward(x, da, gW_ih, gb_ih):
    for r in range(da.shape[0]):
        gW_ih[r, x] += da[r]
        gb_ih[r] += da[r]


@njit(cache=True)
def _recurrent_backward(W_hh, dpre, h_prev, gW_hh, gb_hh, dh_prev):
    G, H = W_hh.shape
    for r in range(G):
        gb_hh[r] += dpre[r]
        for j in range(H):
            gW_hh[r, j] += dpre[r] * h_prev[j]
            dh_prev[j] += W_hh[r, j] * dpre[r]


# --- Elman RNN ---------------------------------------------------------------

@njit(cache=True)
def rnn_forward(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs):
    T = xs.shape[0]
    H = W_hh.shape[1]
    D = W_y.shape[0]
    hs = np.zeros((T + 1, H))
    ys = np.zeros((T, D))
    pre = np.zeros(H)
    for t in range(T):
        _preact(W_ih, b_ih, W_hh, b_hh, xs[t], hs[t], pre)
        for j in range(H):
            hs[t + 1, j] = np.tanh(pre[j])
        _readout(W_y, b_y, hs[t + 1], ys[t])
    return hs, ys


@njit(cache=True)
def rnn_grad(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs, targets, mask):
    hs, ys = rnn_forward(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs)
    loss, dz = _loss_and_dz(ys, targets, mask)
    gW_ih = np.zeros_like(W_ih)
    gb_ih = np.zeros_like(b_ih)
    gW_hh = np.zeros_like(W_hh)
    gb_hh = np.zeros_like(b_hh)
    gW_y = np.zeros_like(W_y)
    gb_y = np.zeros_like(b_y)
    H = W_hh.shape[1]
    dh_next = np.zeros(H)
    da = np.zeros(H)
    for t in range(xs.shape[0] - 1, -1, -1):
        dh = dh_next.copy()
        _readout_backward(W_y, dz[t], hs[t + 1], gW_y, gb_y, dh)
        for j in range(H):
            da[j] = dh[j] * (1.0 - hs[t + 1, j] ** 2)
        _input_backward(xs[t], da, gW_ih, gb_ih)
        dh_next[:] = 0.0
        _recurrent_backward(W_hh, da, hs[t], gW_hh, gb_hh, dh_next)
    return loss, ys, gW_ih, gb_ih, gW_hh, gb_hh, gW_y, gb_y


# --- GRU ---------------------------------------------------------------------

@njit(cache=True)
def gru_forward(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs):
    T = xs.shape[0]
    H = W_hh.shape[1]
    D = W_y.shape[0]
    hs = np.zeros((T + 1, H))
    gates = np.zeros((T, 3 * H))  # r, z, n after activation
    hn = np.zeros((T, H))  # W_hn h + b_hn, needed for the reset-gate gradient
    ys = np.zeros((T, D))
    for t in range(T):
        x = xs[t]
        h = hs[t]
        for j in range(H):
            ar = W_ih[j, x] + b_ih[j] + b_hh[j]
            az = W_ih[H + j, x] + b_ih[H + j] + b_hh[H + j]
            an = b_hh[2 * H + j]
            for i in range(H):
                ar += W_hh[j, i] * h[i]
                az += W_hh[H + j, i] * h[i]
                an += W_hh[2 * H + j, i] * h[i]
            r = _sigmoid(ar)
            z = _sigmoid(az)
            n = np.tanh(W_ih[2 * H + j, x] + b_ih[2 * H + j] + r * an)
            gates[t, j] = r
            gates[t, H + j] = z
            gates[t, 2 * H + j] = n
            hn[t, j] = an
            hs[t + 1, j] = (1.0 - z) * h[j] + z * n
        _readout(W_y, b_y, hs[t + 1], ys[t])
    return hs, ys, gates, hn


@njit(cache=True)
def gru_grad(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs, targets, mask):
    hs, ys, gates, hn = gru_forward(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs)
    loss, dz = _loss_and_dz(ys, targets, mask)
    gW_ih = np.zeros_like(W_ih)
    gb_ih = np.zeros_like(b_ih)
    gW_hh = np.zeros_like(W_hh)
    gb_hh = np.zeros_like(b_hh)
    gW_y = np.zeros_like(W_y)
    gb_y = np.zeros_like(b_y)
    H = W_hh.shape[1]
    dh_next = np.zeros(H)
    d_in = np.zeros(3 * H)
    d_hid = np.zeros(3 * H)
    for t in range(xs.shape[0] - 1, -1, -1):
        dh = dh_next.copy()
        _readout_backward(W_y, dz[t], hs[t + 1], gW_y, gb_y, dh)
        dh_next[:] = 0.0
        for j in range(H):
            r = gates[t, j]
            z = gates[t, H + j]
            n = gates[t, 2 * H + j]
            dn_pre = dh[j] * z * (1.0 - n * n)
            dz_pre = dh[j] * (n - hs[t, j]) * z * (1.0 - z)
            dr_pre = dn_pre * hn[t, j] * r * (1.0 - r)
            d_in[j] = dr_pre
            d_in[H + j] = dz_pre
            d_in[2 * H + j] = dn_pre
            d_hid[j] = dr_pre
            d_hid[H + j] = dz_pre
            d_hid[2 * H + j] = dn_pre * r
            dh_next[j] += dh[j] * (1.0 - z)
        _input_backward(xs[t], d_in, gW_ih, gb_ih)
        _recurrent_backward(W_hh, d_hid, hs[t], gW_hh, gb_hh, dh_next)
    return loss, ys, gW_ih, gb_ih, gW_hh, gb_hh, gW_y, gb_y


# --- LSTM --------------------------------------------------------------------

@njit(cache=True)
def lstm_forward(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs):
    T = xs.shape[0]
    H = W_hh.shape[1]
    D = W_y.shape[0]
    hs = np.zeros((T + 1, H))
    cs = np.zeros((T + 1, H))
    gates = np.zeros((T, 4 * H))  # i, f, g, o after activation
    ys = np.zeros((T, D))
    pre = np.zeros(4 * H)
    for t in range(T):
        _preact(W_ih, b_ih, W_hh, b_hh, xs[t], hs[t], pre)
        for j in range(H):
            i = _sigmoid(pre[j])
            f = _sigmoid(pre[H + j])
            g = np.tanh(pre[2 * H + j])
            o = _sigmoid(pre[3 * H + j])
            gates[t, j] = i
            gates[t, H + j] = f
            gates[t, 2 * H + j] = g
            gates[t, 3 * H + j] = o
            cs[t + 1, j] = f * cs[t, j] + i * g
            hs[t + 1, j] = o * np.tanh(cs[t + 1, j])
        _readout(W_y, b_y, hs[t + 1], ys[t])
    return hs, cs, ys, gates


@njit(cache=True)
def lstm_grad(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs, targets, mask):
    hs, cs, ys, gates = lstm_forward(W_ih, b_ih, W_hh, b_hh, W_y, b_y, xs)
    loss, dz = _loss_and_dz(ys, targets, mask)
    gW_ih = np.zeros_like(W_ih)
    gb_ih = np.zeros_like(b_ih)
    gW_hh = np.zeros_like(W_hh)
    gb_hh = np.zeros_like(b_hh)
    gW_y = np.zeros_like(W_y)
    gb_y = np.zeros_like(b_y)
    H = W_hh.shape[1]
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    dpre = np.zeros(4 * H)
    for t in range(xs.shape[0] - 1, -1, -1):
        dh = dh_next.copy()
        _readout_backward(W_y, dz[t], hs[t + 1], gW_y, gb_y, dh)
        for j in range(H):
            i = gates[t, j]
            f = gates[t, H + j]
            g = gates[t, 2 * H + j]
            o = gates[t, 3 * H + j]
            tc = np.tanh(cs[t + 1, j])
            dc = dc_next[j] + dh[j] * o * (1.0 - tc * tc)
            dpre[j] = dc * g * i * (1.0 - i)
            dpre[H + j] = dc * cs[t, j] * f * (1.0 - f)
            dpre[2 * H + j] = dc * i * (1.0 - g * g)
            dpre[3 * H + j] = dh[j] * tc * o * (1.0 - o)
            dc_next[j] = dc * f
        _input_backward(xs[t], dpre, gW_ih, gb_ih)
        dh_next[:] = 0.0
        _recurrent_backward(W_hh, dpre, hs[t], gW_hh, gb_hh, dh_next)
    return loss, ys, gW_ih, gb_ih, gW_hh, gb_hh, gW_y, gb_y


@njit(cache=True)
def correct_steps(ys, targets, threshold):
    """Per-step flag: thresholded prediction equals the k-hot target on every output."""
    T, D = ys.shape
    ok = np.ones(T, dtype=np.bool_)
    for t in range(T):
        for d in range(D):
            if (ys[t, d] > threshold) != (targets[t, d] > 0.5):
                ok[t] = False
                break
    return ok
