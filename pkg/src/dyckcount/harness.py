"""Training and evaluation under the next-symbol prediction protocol.

A word is *accepted* by a network when, at every timestep, the set of outputs
above 0.5 equals the set of symbols that may legally come next.  Accuracy on
a corpus is the percentage of accepted words.
"""

from __future__ import annotations

import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import _kernels
from .encoding import THRESHOLD, encode_indices, target_matrix
from .languages import (SPLITS, Corpus, LanguageSpec, build_task_splits, default_hidden_size,
                        dyck, task_language)
from .nets import NetParams, NetTrace, NumericalError, _loss_grad, forward, init_params
from .optim import AdamState, adam_step_inplace

log = logging.getLogger(__name__)

# reduced corpus sizes for experiments that must finish in minutes on one core
DESK_SIZES = {"train": 2000, "short_test": 1000, "long_test": 1000}

NEXT_SYMBOL = "next_symbol"
LAST_CLOSING = "last_closing"


@dataclass(frozen=True)
class TrainConfig:
    task: str = "dyck1"
    architecture: str = "lstm"
    hidden: int | None = None  # None: the per-task default (3, 4, 4, 8)
    epochs_max: int = 100
    seed: int = 0
    early_stop: bool = True
    trial_count: int = 10
    lr: float = 1e-3
    readout_bias: bool = False
    objective: str = NEXT_SYMBOL

    @property
    def H(self) -> int:
        return self.hidden if self.hidden is not None else default_hidden_size(self.task)

    @property
    def spec(self) -> LanguageSpec:
        return task_language(self.task)


@dataclass
class TrialReport:
    seed: int
    accuracy: dict[str, float]  # split -> percentage, two decimals
    epochs_run: int
    best_epoch: int
    final_loss: float
    history: list[dict] = field(default_factory=list)
    failed: bool = False
    error: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentSummary:
    config: TrainConfig
    trials: list[TrialReport]
    stats: dict[str, dict[str, float]]  # split -> {"min", "max", "median"}

    @property
    def failed_trials(self) -> list[TrialReport]:
        return [t for t in self.trials if t.failed]

    def to_dict(self) -> dict:
        return {"config": asdict(self.config), "stats": self.stats,
                "trials": [t.to_dict() for t in self.trials]}


# --- encoded samples --------------------------------------------------------------

@dataclass
class Sample:
    xs: np.ndarray  # alphabet indices of the inputs
    targets: np.ndarray  # (T, D)
    mask: np.ndarray  # (T, D) loss weights
    answer: int = -1  # last-closing task: alphabet index of the held-out symbol


def encode_sample(spec: LanguageSpec, s: str, objective: str = NEXT_SYMBOL) -> Sample:
    if objective == NEXT_SYMBOL:
        targets = target_matrix(s, spec)
        return Sample(encode_indices(s, spec), targets, np.ones_like(targets))
    if objective == LAST_CLOSING:
        if len(s) < 2:
            raise ValueError("last-closing samples need words of length >= 2")
        D = len(spec.alphabet)
        xs = encode_indices(s[:-1], spec)
        answer = spec.index[s[-1]]
        targets = np.zeros((len(xs), D))
        mask = np.zeros((len(xs), D))
        targets[-1, answer] = 1.0
        mask[-1, spec.k:] = 1.0
        return Sample(xs, targets, mask, answer)
    raise ValueError(f"unknown objective {objective!r}")


def encode_corpus(corpus: Corpus, objective: str = NEXT_SYMBOL) -> list[Sample]:
    return [encode_sample(corpus.spec, s, objective) for s in corpus.strings]


def last_closing_target(s: str) -> str:
    """The symbol that closes a Dyck word whose final symbol was removed."""
    spec = dyck(2)
    stack = []
    for sym in s:
        if spec.is_opening(sym):
            stack.append(sym)
        else:
            stack.pop()
    if len(stack) != 1:
        raise ValueError(f"{s!r} is not a Dyck word missing exactly its last symbol")
    return spec.closings[spec.openings.index(stack[0])]


def _accepts(params: NetParams, sample: Sample, objective: str) -> bool:
    y = forward(params, sample.xs).y
    if objective == LAST_CLOSING:
        k = params.D // 2
        return k + int(np.argmax(y[-1, k:])) == sample.answer
    return bool(_kernels.correct_steps(y, sample.targets, THRESHOLD).all())


# --- classification and evaluation ---------------------------------------------------

@dataclass
class Classification:
    accepted: bool
    correct: np.ndarray  # per-step flags
    margin: float  # distance of the closest output to the threshold
    trace: NetTrace


def classify_sequence(params: NetParams, spec: LanguageSpec, s: str) -> Classification:
    targets = target_matrix(s, spec)
    trace = forward(params, encode_indices(s, spec))
    correct = _kernels.correct_steps(trace.y, targets, THRESHOLD)
    margin = float(np.min(np.abs(trace.y - THRESHOLD))) if len(s) else np.inf
    return Classification(bool(correct.all()), correct, margin, trace)


def evaluate_samples(params: NetParams, samples: list[Sample], objective: str = NEXT_SYMBOL) -> float:
    if not samples:
        return 0.0
    return 100.0 * sum(_accepts(params, smp, objective) for smp in samples) / len(samples)


def evaluate(params: NetParams, corpus: Corpus, objective: str = NEXT_SYMBOL) -> float:
    """Percentage of words of ``corpus`` the network accepts."""
    return evaluate_samples(params, encode_corpus(corpus, objective), objective)


# --- training -------------------------------------------------------------------------

def trial_seed(master: int, trial: int) -> int:
    """Seed of trial ``trial``; shared by every architecture so runs stay comparable."""
    return master + 1000 * trial


def train(config: TrainConfig, splits: dict[str, Corpus],
          progress=None) -> tuple[NetParams, TrialReport]:
    """Train one network with per-sequence Adam updates on the full-sequence MSE.

    After every epoch the training accuracy is measured; the returned network
    is the epoch with the best training accuracy (ties go to the later epoch).
    Training stops early at 100% when ``config.early_stop`` is set.  A
    non-finite loss ends the trial and marks it failed.
    """
    spec = splits["train"].spec
    D = len(spec.alphabet)
    init_seed, order_seed = np.random.SeedSequence(config.seed).spawn(2)
    params = init_params(config.architecture, D, config.H,
                         seed=int(init_seed.generate_state(1)[0]), readout_bias=config.readout_bias)
    order_rng = np.random.default_rng(order_seed)
    encoded = {name: encode_corpus(c, config.objective) for name, c in splits.items()}
    train_set = encoded["train"]

    best = params.copy()
    best_acc = evaluate_samples(params, train_set, config.objective)
    best_epoch = 0
    history = [{"epoch": 0, "loss": None, "train_acc": round(best_acc, 2)}]
    state = AdamState.for_params(params)
    theta = params.theta
    epochs_run = 0
    loss_mean = float("nan")
    failed, error = False, None
    for epoch in range(1, config.epochs_max + 1):
        if config.early_stop and best_acc == 100.0:
            break
        total = 0.0
        try:
            for i in order_rng.permutation(len(train_set)):
                smp = train_set[i]
                loss, grad, _ = _loss_grad(params, smp.xs, smp.targets, smp.mask)
                adam_step_inplace(theta, grad, state, lr=config.lr)
                total += loss
        except NumericalError as e:
            failed, error = True, f"epoch {epoch}: {e}"
            log.warning("trial seed=%d diverged: %s", config.seed, error)
            break
        epochs_run = epoch
        loss_mean = total / max(len(train_set), 1)
        acc = evaluate_samples(params, train_set, config.objective)
        history.append({"epoch": epoch, "loss": loss_mean, "train_acc": round(acc, 2)})
        if progress is not None:
            progress(epoch, loss_mean, acc)
        if acc >= best_acc:
            best, best_acc, best_epoch = params.copy(), acc, epoch

    accuracy = {name: round(evaluate_samples(best, samples, config.objective), 2)
                for name, samples in encoded.items()}
    report = TrialReport(config.seed, accuracy, epochs_run, best_epoch, loss_mean, history, failed, error)
    return best, report


def summarize(trials: list[TrialReport], splits=SPLITS) -> dict[str, dict[str, float]]:
    """Min / max / median accuracy per split over the trials that did not fail."""
    ok = [t for t in trials if not t.failed]
    stats = {}
    for name in splits:
        values = sorted(t.accuracy[name] for t in ok if name in t.accuracy)
        if values:
            stats[name] = {"min": values[0], "max": values[-1],
                           "median": round(statistics.median(values), 2)}
    return stats


def _run_trial(args) -> tuple[TrialReport, NetParams]:
    config, sizes, windows, i = args
    seed = trial_seed(config.seed, i)
    splits = build_task_splits(config.task, seed, sizes=sizes, windows=windows)
    params, report = train(replace(config, seed=seed), splits)
    return report, params


def run_experiment(config: TrainConfig, sizes: dict[str, int] | None = None,
                   windows: dict[str, tuple[int, int]] | None = None,
                   workers: int = 1) -> ExperimentSummary:
    """Run ``config.trial_count`` independent trials and aggregate them.

    Trial ``i`` regenerates its corpora and initialization from
    ``trial_seed(config.seed, i)``, so the same trial of different
    architectures sees the same data.
    """
    jobs = [(config, sizes, windows, i) for i in range(config.trial_count)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_trial, jobs))
    else:
        results = [_run_trial(job) for job in jobs]
    trials = [r for r, _ in results]
    for t in trials:
        if t.failed:
            log.warning("trial seed=%d failed and is excluded from aggregation: %s", t.seed, t.error)
    return ExperimentSummary(config, trials, summarize(trials))


# --- variant experiments -------------------------------------------------------------

PROBES = {
    "dyck1": "((((()))))(()())((()()))()",
    "shuffle2": "([(])[])(([)])[([])]",
    "shuffle6": "([{⟨⌈⌊⌋⌉⟩}])([)]{⟨}⌈⟩⌉⌊(⌋)",
    "dyck2": "([([])])[(())][[]]",
}


def single_unit_experiment(task: str = "dyck1", H: int | None = None, trial_count: int = 3,
                           seed: int = 0, epochs_max: int = 100, early_stop: bool = True,
                           sizes=None, windows=None,
                           probe: str | None = None) -> tuple[ExperimentSummary, NetTrace, NetParams]:
    """Tiny LSTMs: one unit for Dyck-1, two for Shuffle-2.

    These networks carry a readout bias: without it a single unit cannot keep
    the opening outputs above threshold while switching the closing output
    on and off.  Returns the summary, a trace of the best trial on the probe
    word, and that trial's parameters.
    """
    H = H if H is not None else {"dyck1": 1, "shuffle2": 2}[task]
    config = TrainConfig(task=task, architecture="lstm", hidden=H, epochs_max=epochs_max,
                         seed=seed, early_stop=early_stop, trial_count=trial_count, readout_bias=True)
    results = [_run_trial((config, sizes, windows, i)) for i in range(trial_count)]
    trials = [r for r, _ in results]
    summary = ExperimentSummary(config, trials, summarize(trials))
    _, best_params = max(results, key=lambda rp: (rp[0].accuracy.get("short_test", 0), -rp[0].seed))
    probe = probe or PROBES[task]
    return summary, forward(best_params, encode_indices(probe, config.spec)), best_params


def last_closing_task(seed: int = 0, trial_count: int = 3, epochs_max: int = 20, H: int = 4,
                      early_stop: bool = True, sizes=None, windows=None) -> ExperimentSummary:
    """Predict the final closing symbol of a Dyck-2 word from the rest of it.

    Only the last timestep is supervised (MSE on the two closing outputs); a
    word counts as correct when the larger of the two closing outputs is the
    right one.
    """
    config = TrainConfig(task="dyck2", architecture="lstm", hidden=H, epochs_max=epochs_max,
                         seed=seed, early_stop=early_stop, trial_count=trial_count, objective=LAST_CLOSING)
    return run_experiment(config, sizes=sizes, windows=windows)


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.std() == 0 or b.std() == 0:
        return 0.0
    return float(np.corrcoef(a, b)[0, 1])
