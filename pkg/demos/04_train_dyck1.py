"""Training an LSTM with three units on Dyck-1 and looking inside it.

A few minutes on one core.  Writes a trace CSV and SVG to demos/out/.

Run: python demos/04_train_dyck1.py
"""
from pathlib import Path

from dyckcount import TrainConfig, build_task_splits, train
from dyckcount.traces import trace_csv, trace_svg

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

splits = build_task_splits("dyck1", seed=0, sizes={"train": 1000, "short_test": 500, "long_test": 500})
config = TrainConfig(task="dyck1", architecture="lstm", epochs_max=20, early_stop=False, seed=0)
params, report = train(config, splits, progress=lambda e, loss, acc: print(f"epoch {e:2d} loss {loss:.5f} "
                                                                            f"train {acc:6.2f}%"))
print("best epoch", report.best_epoch, "accuracy", report.accuracy)

# Long words are where counting shows: the cell states should rise and fall with the depth.
word = max(splits["long_test"].strings[:50], key=len)
(out / "dyck1_trace.csv").write_text(trace_csv(params, splits["train"].spec, word), encoding="utf-8")
(out / "dyck1_trace.svg").write_text(trace_svg(params, splits["train"].spec, word), encoding="utf-8")
print("wrote", out / "dyck1_trace.svg")
