"""One LSTM unit is enough for Dyck-1: first by hand, then by training.

Run: python demos/05_single_unit_counter.py
"""
from pathlib import Path

import numpy as np

from dyckcount import dyck, single_unit_experiment
from dyckcount.harness import DESK_SIZES, PROBES, classify_sequence, pearson
from dyckcount.nets import counter_lstm
from dyckcount.oracles import depth_profile
from dyckcount.traces import trace_svg

probe = PROBES["dyck1"]
depth = np.array(depth_profile(probe, dyck(1).pairs[0]))

# Hand-set weights: gates pinned open, candidate +1 on "(" and -1 on ")".
hand = counter_lstm(1)
result = classify_sequence(hand, dyck(1), probe)
print("hand-set cell state:", np.round(result.trace.c[:, 0], 2).tolist())
print("depth:              ", depth.tolist())
print("accepted:", result.accepted)

# A trained single unit learns the same kind of counter (takes about a minute).
summary, trace, params = single_unit_experiment("dyck1", H=1, trial_count=3, epochs_max=60, early_stop=False,
                                                sizes=DESK_SIZES)
print("trained H=1 accuracy:", summary.stats)
print("corr(cell state, depth) on the probe:", round(pearson(trace.c[:, 0], depth), 4))
out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
(out / "single_unit.svg").write_text(trace_svg(params, dyck(1), probe), encoding="utf-8")
