"""Dyck and shuffle languages, their probabilistic grammars, and corpus samplers.

Strings are plain Python ``str`` objects with one character per symbol.  The
six parenthesis pairs are always taken in the fixed order below, so ``Dyck-2``
uses ``( )`` and ``[ ]``, ``Shuffle-6`` uses all six.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable

import numpy as np

DYCK = "dyck"
SHUFFLE = "shuffle"

PAIR_SYMBOLS = [
    ("(", ")"),
    ("[", "]"),
    ("{", "}"),
    ("⟨", "⟩"),
    ("⌈", "⌉"),
    ("⌊", "⌋"),
]

# ASCII aliases for the three non-ASCII pairs (serialization only).
ASCII_ALIASES = {
    "⟨": "<",
    "⟩": ">",
    "⌈": "lc",
    "⌉": "rc",
    "⌊": "lf",
    "⌋": "rf",
}

DEFAULT_LENGTH_CAP = 10_000


class CorpusExhausted(ValueError):
    """Rejection sampling ran out of attempts before reaching the requested count."""


@dataclass(frozen=True)
class ParenPair:
    open_symbol: str
    close_symbol: str
    index: int

    def __post_init__(self):
        if self.open_symbol == self.close_symbol:
            raise ValueError(f"pair {self.index}: opening and closing symbol coincide")
        if self.index < 0:
            raise ValueError("pair index must be non-negative")


@dataclass(frozen=True)
class LanguageSpec:
    """One of the studied languages: ``Dyck-k`` or ``Shuffle-k``.

    The alphabet lists all openings in pair order followed by all closings in
    pair order; this order fixes the one-hot and k-hot vector indices.
    """

    kind: str
    pairs: tuple[ParenPair, ...]

    def __post_init__(self):
        if self.kind not in (DYCK, SHUFFLE):
            raise ValueError(f"unknown language kind {self.kind!r}")
        if not self.pairs:
            raise ValueError("a language needs at least one pair")
        symbols = [s for p in self.pairs for s in (p.open_symbol, p.close_symbol)]
        if len(set(symbols)) != len(symbols):
            raise ValueError("a symbol appears in more than one pair")

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def name(self) -> str:
        return f"{self.kind.capitalize()}-{self.k}"

    @cached_property
    def openings(self) -> tuple[str, ...]:
        return tuple(p.open_symbol for p in self.pairs)

    @cached_property
    def closings(self) -> tuple[str, ...]:
        return tuple(p.close_symbol for p in self.pairs)

    @cached_property
    def alphabet(self) -> tuple[str, ...]:
        return self.openings + self.closings

    @cached_property
    def index(self) -> dict[str, int]:
        """Symbol -> position in :attr:`alphabet`."""
        return {s: i for i, s in enumerate(self.alphabet)}

    @cached_property
    def pair_of(self) -> dict[str, int]:
        """Symbol -> index of the pair it belongs to."""
        return {s: i for i, p in enumerate(self.pairs) for s in (p.open_symbol, p.close_symbol)}

    def is_opening(self, symbol: str) -> bool:
        return self.index[symbol] < self.k

    @property
    def is_counter_language(self) -> bool:
        """True when a k-counter machine suffices (Dyck-1 and every Shuffle-k)."""
        return self.kind == SHUFFLE or self.k == 1

    def to_dict(self) -> dict:
        return {"kind": self.kind, "k": self.k, "alphabet": list(self.alphabet)}

    @classmethod
    def from_dict(cls, d: dict) -> "LanguageSpec":
        return make_language(d["kind"], int(d["k"]))


@lru_cache(maxsize=None)
def make_language(kind: str, k: int) -> LanguageSpec:
    if not 1 <= k <= len(PAIR_SYMBOLS):
        raise ValueError(f"k must be between 1 and {len(PAIR_SYMBOLS)}, got {k}")
    pairs = tuple(ParenPair(o, c, i) for i, (o, c) in enumerate(PAIR_SYMBOLS[:k]))
    return LanguageSpec(kind, pairs)


def dyck(k: int) -> LanguageSpec:
    return make_language(DYCK, k)


def shuffle(k: int) -> LanguageSpec:
    return make_language(SHUFFLE, k)


# task name -> (language, number of training strings, default hidden size)
TASKS = {
    "dyck1": (DYCK, 1, 10_000, 3),
    "shuffle2": (SHUFFLE, 2, 10_000, 4),
    "shuffle6": (SHUFFLE, 6, 30_000, 8),
    "dyck2": (DYCK, 2, 10_000, 4),
}

SPLITS = ("train", "short_test", "long_test")
DEFAULT_WINDOWS = {"train": (2, 50), "short_test": (2, 50), "long_test": (52, 100)}
DEFAULT_TEST_SIZE = 5_000


def task_language(task: str) -> LanguageSpec:
    try:
        kind, k, _, _ = TASKS[task]
    except KeyError:
        raise ValueError(f"unknown task {task!r}; expected one of {sorted(TASKS)}") from None
    return make_language(kind, k)


def default_hidden_size(task: str) -> int:
    return TASKS[task][3]


@dataclass(frozen=True)
class GrammarParams:
    """Branch probabilities of ``S -> (S) | SS | eps``: bracket ``p``, concatenation ``q``."""

    p: float = 0.5
    q: float = 0.25

    def __post_init__(self):
        if not (0 < self.p < 1 and 0 < self.q < 1 and self.p + self.q < 1):
            raise ValueError(f"need 0 < p, q < 1 and p + q < 1, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class Corpus:
    spec: LanguageSpec
    split: str
    strings: tuple[str, ...]
    manifest: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.strings)

    def __iter__(self):
        return iter(self.strings)


def sample_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Child generator for sample ``index`` of ``stream`` under master ``seed``.

    PCG64 seeded through ``SeedSequence(seed, spawn_key=(stream, index))``, so
    each sample owns an independent stream and corpora do not depend on how
    many draws earlier samples consumed.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.PCG64(ss))


def sample_grammar(spec: LanguageSpec, params: GrammarParams, rng: np.random.Generator,
                   cap: int = DEFAULT_LENGTH_CAP) -> str | None:
    """Expand ``S`` once with the Dyck-k grammar over ``spec.pairs``.

    The bracketing probability ``p`` is shared evenly between the k pairs.
    Returns ``None`` when the derivation would exceed ``cap`` symbols; the
    caller resamples.
    """
    k = spec.k
    p, q = params.p, params.q
    out: list[str] = []
    stack: list[str | None] = [None]  # None stands for the nonterminal S
    committed = 0  # emitted symbols plus closings already promised
    draws = rng.random(64)
    pos = 0
    while stack:
        top = stack.pop()
        if top is not None:
            out.append(top)
            continue
        if pos == len(draws):
            draws = rng.random(64)
            pos = 0
        r = draws[pos]
        pos += 1
        if r < p:
            pair = spec.pairs[min(int(r * k / p), k - 1)]
            committed += 2
            if committed > cap:
                return None
            out.append(pair.open_symbol)
            stack.append(pair.close_symbol)
            stack.append(None)
        elif r < p + q:
            stack.append(None)
            stack.append(None)
    return "".join(out)


def build_corpus(spec: LanguageSpec, params: GrammarParams, length_window: tuple[int, int],
                 count: int, exclusion: Iterable[str] = (), seed: int = 0, *,
                 split: str = "train", stream: int = 0, attempt_budget: int | None = None,
                 cap: int = DEFAULT_LENGTH_CAP) -> Corpus:
    """Draw ``count`` distinct grammar samples whose lengths fall in ``length_window``.

    Sample ``i`` always uses :func:`sample_rng` ``(seed, stream, i)``.  Derivations
    are abandoned as soon as they are known to overshoot the window, which
    leaves the accepted samples unchanged.
    """
    lo, hi = length_window
    if count < 1:
        raise ValueError("count must be at least 1")
    if lo < 2 or hi < lo:
        raise ValueError(f"invalid length window {length_window}")
    if attempt_budget is None:
        attempt_budget = 1000 * count
    excluded = set(exclusion)
    seen: set[str] = set()
    strings: list[str] = []
    limit = min(cap, hi)
    for i in range(attempt_budget):
        s = sample_grammar(spec, params, sample_rng(seed, stream, i), cap=limit)
        if s is None or not lo <= len(s) <= hi or s in seen or s in excluded:
            continue
        seen.add(s)
        strings.append(s)
        if len(strings) == count:
            break
    else:
        n = len(strings)
        raise CorpusExhausted(
            f"only {n} distinct string{'' if n == 1 else 's'} available in window "
            f"[{lo},{hi}] after {attempt_budget} draws (requested {count})")
    manifest = {
        "seed": seed,
        "stream": stream,
        "length_window": [lo, hi],
        "requested_count": count,
        "grammar": {"p": params.p, "q": params.q},
        "split": split,
        "draws": i + 1,
    }
    return Corpus(spec, split, tuple(strings), manifest)


def build_task_splits(task: str, seed: int, sizes: dict[str, int] | None = None,
                      windows: dict[str, tuple[int, int]] | None = None,
                      params: GrammarParams = GrammarParams()) -> dict[str, Corpus]:
    """Train, short-test and long-test corpora for one of the four tasks.

    Shuffle tasks reuse the Dyck grammar over the same pairs; the resulting
    strings are labelled by the shuffle language downstream.  Later splits
    exclude every string of the earlier ones.
    """
    spec = task_language(task)
    default_sizes = {"train": TASKS[task][2], "short_test": DEFAULT_TEST_SIZE,
                     "long_test": DEFAULT_TEST_SIZE}
    sizes = {**default_sizes, **(sizes or {})}
    windows = {**DEFAULT_WINDOWS, **(windows or {})}
    splits: dict[str, Corpus] = {}
    used: set[str] = set()
    for stream, name in enumerate(SPLITS):
        corpus = build_corpus(spec, params, windows[name], sizes[name], used, seed,
                              split=name, stream=stream)
        corpus.manifest["task"] = task
        used.update(corpus.strings)
        splits[name] = corpus
    return splits


MAX_SHUFFLE_LENGTH = 16


def shuffle_strings(u: str, v: str) -> set[str]:
    """All interleavings of ``u`` and ``v`` that keep each string's internal order."""
    if len(u) + len(v) > MAX_SHUFFLE_LENGTH:
        raise ValueError(f"too long for enumeration: |u|+|v| = {len(u) + len(v)} > {MAX_SHUFFLE_LENGTH}")
    return set(_shuffle(u, v))


@lru_cache(maxsize=4096)
def _shuffle(u: str, v: str) -> frozenset[str]:
    if not u or not v:
        return frozenset({u + v})
    return frozenset({u[0] + w for w in _shuffle(u[1:], v)} | {v[0] + w for w in _shuffle(u, v[1:])})


def expected_shuffle_count(u: str, v: str) -> int:
    return math.comb(len(u) + len(v), len(u))
