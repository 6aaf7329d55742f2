"""Single-layer Elman RNN, GRU and LSTM cells with a sigmoid readout.

All parameters of a network live in one flat float64 vector; the named
blocks (``W_ih``, ``b_ih``, ``W_hh``, ``b_hh``, ``W_y`` and optionally
``b_y``) are reshaped views into it, in that order.  This keeps the optimizer,
the gradient checker and checkpoints oblivious to the architecture.

Recurrence (gate blocks stacked row-wise, GRU ``r, z, n``, LSTM ``i, f, g, o``)::

    rnn   h' = tanh(W_ih x + b_ih + W_hh h + b_hh)
    gru   r, z = sigmoid(...);  n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
          h' = (1 - z) * h + z * n
    lstm  i, f, o = sigmoid(...);  g = tanh(...)
          c' = f * c + i * g;  h' = o * tanh(c')
    y = sigmoid(W_y h' [+ b_y])
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

ARCHITECTURES = ("rnn", "gru", "lstm")
GATES = {"rnn": 1, "gru": 3, "lstm": 4}
BLOCK_ORDER = ("W_ih", "b_ih", "W_hh", "b_hh", "W_y", "b_y")


class NumericalError(FloatingPointError):
    pass


def block_shapes(architecture: str, D: int, H: int, readout_bias: bool = False) -> dict[str, tuple]:
    G = GATES[architecture] * H
    shapes = {"W_ih": (G, D), "b_ih": (G,), "W_hh": (G, H), "b_hh": (G,), "W_y": (D, H)}
    if readout_bias:
        shapes["b_y"] = (D,)
    return shapes


def parameter_count(architecture: str, D: int, H: int, readout_bias: bool = False) -> int:
    return sum(int(np.prod(s)) for s in block_shapes(architecture, D, H, readout_bias).values())


@dataclass
class NetParams:
    architecture: str
    D: int
    H: int
    theta: np.ndarray
    readout_bias: bool = False

    def __post_init__(self):
        if self.architecture not in GATES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        self.theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        n = parameter_count(self.architecture, self.D, self.H, self.readout_bias)
        if self.theta.shape != (n,):
            raise ValueError(f"{self.architecture} D={self.D} H={self.H} needs {n} parameters, got {self.theta.shape}")

    @property
    def shapes(self) -> dict[str, tuple]:
        return block_shapes(self.architecture, self.D, self.H, self.readout_bias)

    def blocks(self, theta: np.ndarray | None = None) -> dict[str, np.ndarray]:
        """Named views into ``theta`` (default: this network's own vector)."""
        theta = self.theta if theta is None else theta
        out, pos = {}, 0
        for name, shape in self.shapes.items():
            size = int(np.prod(shape))
            out[name] = theta[pos:pos + size].reshape(shape)
            pos += size
        return out

    def kernel_args(self) -> tuple:
        b = self.blocks()
        b_y = b.get("b_y", np.zeros(self.D))
        return b["W_ih"], b["b_ih"], b["W_hh"], b["b_hh"], b["W_y"], b_y

    def copy(self) -> "NetParams":
        return NetParams(self.architecture, self.D, self.H, self.theta.copy(), self.readout_bias)

    def check_finite(self):
        if not np.all(np.isfinite(self.theta)):
            bad = [k for k, v in self.blocks().items() if not np.all(np.isfinite(v))]
            raise NumericalError(f"non-finite parameters in {', '.join(bad)}")


def init_params(architecture: str, D: int, H: int, seed: int, readout_bias: bool = False) -> NetParams:
    """Weights uniform in ``[-1/sqrt(H), 1/sqrt(H)]``, biases zero."""
    if architecture not in GATES:
        raise ValueError(f"unknown architecture {architecture!r}")
    if D < 1 or H < 1:
        raise ValueError("D and H must be positive")
    params = NetParams(architecture, D, H,
                       np.zeros(parameter_count(architecture, D, H, readout_bias)), readout_bias)
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(H)
    for name, block in params.blocks().items():
        if name.startswith("W"):
            block[...] = rng.uniform(-bound, bound, size=block.shape)
    return params


def zeros_like(params: NetParams) -> NetParams:
    return NetParams(params.architecture, params.D, params.H, np.zeros_like(params.theta), params.readout_bias)


# --- single step (reference path, accepts arbitrary input vectors) -------------

def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass
class CellState:
    h: np.ndarray
    c: np.ndarray | None = None


def initial_state(params: NetParams) -> CellState:
    c = np.zeros(params.H) if params.architecture == "lstm" else None
    return CellState(np.zeros(params.H), c)


def step(params: NetParams, x: np.ndarray, state: CellState) -> tuple[CellState, np.ndarray]:
    params.check_finite()
    b = params.blocks()
    H = params.H
    h = state.h
    gi = b["W_ih"] @ x + b["b_ih"]
    gh = b["W_hh"] @ h + b["b_hh"]
    if params.architecture == "rnn":
        new = CellState(np.tanh(gi + gh))
    elif params.architecture == "gru":
        r = _sigmoid(gi[:H] + gh[:H])
        z = _sigmoid(gi[H:2 * H] + gh[H:2 * H])
        n = np.tanh(gi[2 * H:] + r * gh[2 * H:])
        new = CellState((1 - z) * h + z * n)
    else:
        a = gi + gh
        i, f = _sigmoid(a[:H]), _sigmoid(a[H:2 * H])
        g, o = np.tanh(a[2 * H:3 * H]), _sigmoid(a[3 * H:])
        c = f * state.c + i * g
        new = CellState(o * np.tanh(c), c)
    z = b["W_y"] @ new.h
    if "b_y" in b:
        z = z + b["b_y"]
    return new, _sigmoid(z)


# --- whole sequences (compiled path) -------------------------------------------

@dataclass
class NetTrace:
    """Per-step hidden states, LSTM cell states (``None`` otherwise) and outputs."""

    h: np.ndarray  # (T, H)
    c: np.ndarray | None  # (T, H)
    y: np.ndarray  # (T, D)

    def __len__(self):
        return self.y.shape[0]


def _as_indices(inputs, D: int) -> np.ndarray:
    arr = np.asarray(inputs)
    if arr.ndim == 2:
        if arr.shape[1] != D:
            raise ValueError(f"input dimension {arr.shape[1]} does not match D={D}")
        return np.argmax(arr, axis=1).astype(np.int64) if len(arr) else np.zeros(0, np.int64)
    arr = arr.astype(np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() >= D):
        raise ValueError(f"input index out of range for D={D}")
    return arr


def forward(params: NetParams, inputs) -> NetTrace:
    """Run the cell from the zero state over ``inputs``.

    ``inputs`` is either a ``(T, D)`` stack of one-hot rows or a length-T
    array of alphabet indices.
    """
    params.check_finite()
    xs = _as_indices(inputs, params.D)
    args = params.kernel_args()
    if params.architecture == "lstm":
        hs, cs, ys, _ = _kernels.lstm_forward(*args, xs)
        trace = NetTrace(hs[1:], cs[1:], ys)
    elif params.architecture == "gru":
        hs, ys, _, _ = _kernels.gru_forward(*args, xs)
        trace = NetTrace(hs[1:], None, ys)
    else:
        hs, ys = _kernels.rnn_forward(*args, xs)
        trace = NetTrace(hs[1:], None, ys)
    _check_trace(trace)
    return trace


def _check_trace(trace: NetTrace):
    for arr in (trace.h, trace.c, trace.y):
        if arr is not None and not np.all(np.isfinite(arr)):
            t = int(np.flatnonzero(~np.all(np.isfinite(arr), axis=1))[0])
            raise NumericalError(f"non-finite state at timestep {t}")


def mse_loss(outputs, targets, mask=None) -> float:
    """Mean of ``(y - t)**2`` over every timestep and output (or over ``mask``)."""
    outputs = np.asarray(outputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if outputs.shape != targets.shape:
        raise ValueError(f"length mismatch: outputs {outputs.shape} vs targets {targets.shape}")
    if outputs.size == 0:
        return 0.0
    w = np.ones_like(outputs) if mask is None else np.asarray(mask, dtype=float)
    return float(np.sum(w * (outputs - targets) ** 2) / np.sum(w))


_GRAD_KERNELS = {"rnn": _kernels.rnn_grad, "gru": _kernels.gru_grad, "lstm": _kernels.lstm_grad}


def backward(params: NetParams, inputs, targets, mask=None) -> tuple[float, np.ndarray]:
    """Loss and its exact gradient (full BPTT) as a flat vector aligned with ``params.theta``."""
    xs = _as_indices(inputs, params.D)
    targets = np.ascontiguousarray(targets, dtype=np.float64).reshape(len(xs), params.D)
    mask = np.ones_like(targets) if mask is None else np.ascontiguousarray(mask, dtype=np.float64)
    loss, grad, _ = _loss_grad(params, xs, targets, mask)
    return loss, grad


def _loss_grad(params: NetParams, xs, targets, mask):
    loss, ys, *grads = _GRAD_KERNELS[params.architecture](*params.kernel_args(), xs, targets, mask)
    if not params.readout_bias:
        grads = grads[:-1]
    grad = np.concatenate([g.ravel() for g in grads])
    if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
        bad = ~np.all(np.isfinite(ys), axis=1)
        where = f" at timestep {int(np.flatnonzero(bad)[0])}" if bad.any() else ""
        raise NumericalError(f"non-finite loss or gradient{where}")
    return loss, grad, ys


# --- gradient checking ---------------------------------------------------------

@dataclass
class GradCheckReport:
    architecture: str
    D: int
    H: int
    trials: int
    max_rel_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance


def numerical_gradient(params: NetParams, xs, targets, mask=None, eps: float = 1e-5) -> np.ndarray:
    """Central finite differences of the loss, one parameter at a time."""
    mask = np.ones_like(targets) if mask is None else mask
    theta = params.theta
    out = np.zeros_like(theta)
    probe = params.copy()
    for i in range(theta.size):
        probe.theta[i] = theta[i] + eps
        up = mse_loss(forward(probe, xs).y, targets, mask)
        probe.theta[i] = theta[i] - eps
        down = mse_loss(forward(probe, xs).y, targets, mask)
        probe.theta[i] = theta[i]
        out[i] = (up - down) / (2 * eps)
    return out


def relative_error(a: np.ndarray, b: np.ndarray, floor: float = 1e-7) -> np.ndarray:
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


def gradient_check(architecture: str, D: int, H: int, trials: int = 3, seed: int = 0,
                   max_len: int = 8, tolerance: float = 1e-4, readout_bias: bool = False) -> GradCheckReport:
    """Compare BPTT gradients with central differences on random networks and sequences.

    The relative-error denominator is floored at ``1e-7``: central differences
    of a float64 loss carry round-off near ``1e-12``, which swamps relative
    error for gradient entries smaller than that floor.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(trials):
        params = init_params(architecture, D, H, seed=int(rng.integers(2**31)), readout_bias=readout_bias)
        # larger weights than the default init, to exercise saturation
        params.theta[:] = rng.normal(0.0, 1.0, size=params.theta.shape)
        T = int(rng.integers(1, max_len + 1))
        xs = rng.integers(0, D, size=T)
        targets = (rng.random((T, D)) < 0.5).astype(float)
        _, analytic = backward(params, xs, targets)
        numeric = numerical_gradient(params, xs, targets)
        worst = max(worst, float(relative_error(analytic, numeric).max()))
    return GradCheckReport(architecture, D, H, trials, worst, tolerance)


# --- hand-built counting network -------------------------------------------------

def counter_lstm(k: int, gain: float = 20.0) -> NetParams:
    """LSTM with one counting unit per parenthesis pair and a readout bias.

    Unit ``j`` adds ``+1`` to its cell on opening ``j`` and ``-1`` on closing
    ``j`` (input, forget and output gates are pinned open), so the cell state
    equals the depth of pair ``j``.  It solves the prediction task for Dyck-1
    and every Shuffle-k exactly, and serves as a known-good checkpoint.
    """
    D, H = 2 * k, k
    params = NetParams("lstm", D, H, np.zeros(parameter_count("lstm", D, H, True)), True)
    b = params.blocks()
    b["b_ih"][:H] = gain  # input gate
    b["b_ih"][H:2 * H] = gain  # forget gate
    b["b_ih"][3 * H:] = gain  # output gate
    for j in range(k):
        b["W_ih"][2 * H + j, j] = gain  # candidate +1 on opening j
        b["W_ih"][2 * H + j, k + j] = -gain  # candidate -1 on closing j
    # openings always predicted; closing j predicted iff tanh(depth_j) > ~0.38
    b["b_y"][:k] = gain
    for j in range(k):
        b["W_y"][k + j, j] = 10.0
        b["b_y"][k + j] = -4.0
    return params
