"""Checking BPTT against finite differences, then one Adam step by hand.

Run: python demos/03_gradients_and_adam.py
"""
import numpy as np

from dyckcount import AdamState, adam_update, backward, gradient_check, init_params

for arch in ("rnn", "gru", "lstm"):
    report = gradient_check(arch, D=4, H=3, trials=3, seed=0)
    print(f"{arch:4s} max relative error {report.max_rel_error:.2e} -> {'pass' if report.passed else 'FAIL'}")

# The loss of an untrained LSTM on "(())" and the size of its gradient.
params = init_params("lstm", D=2, H=3, seed=0)
targets = np.array([[1, 1], [1, 1], [1, 1], [1, 0]], dtype=float)
loss, grad = backward(params, [0, 0, 1, 1], targets)
print(f"loss {loss:.4f}, gradient norm {np.linalg.norm(grad):.4f}")

# First Adam step moves every coordinate by about the learning rate, whatever the gradient scale.
new, state = adam_update(params, grad, AdamState.for_params(params))
print("largest first-step move:", np.abs(new.theta - params.theta).max())
