"""Dyck-2 needs a stack: next-symbol prediction fails, but the last closing is learnable.

Several minutes on one core.

Run: python demos/06_dyck2_and_last_closing.py
"""
from dyckcount import TrainConfig, last_closing_task, run_experiment
from dyckcount.harness import DESK_SIZES

config = TrainConfig(task="dyck2", architecture="lstm", epochs_max=30, early_stop=False, trial_count=2)
summary = run_experiment(config, sizes=DESK_SIZES)
print("Dyck-2 next-symbol prediction:", summary.stats)

# Only the final closing symbol is asked for, so the network never has to remember the whole stack.
summary = last_closing_task(trial_count=2, epochs_max=20,
                            sizes={"train": 10_000, "short_test": 1_000, "long_test": 1_000})
print("Dyck-2 last closing symbol:", summary.stats)
