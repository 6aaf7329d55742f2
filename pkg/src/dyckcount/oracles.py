"""Exact recognizers for the four languages.

Dyck-k words are checked with a pushdown stack of pair indices; Dyck-1 and
every Shuffle-k with one counter per pair.  Besides membership, the machines
give the set of symbols that may legally follow a prefix, which is the
training target of the next-symbol prediction task.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from typing import Iterator

from .languages import DYCK, Corpus, LanguageSpec, ParenPair


class ForeignSymbol(ValueError):
    pass


class DeadPrefix(ValueError):
    """The prefix cannot be extended to any word of the language."""


class NotMember(ValueError):
    pass


def _check_symbols(spec: LanguageSpec, s: str) -> None:
    for pos, sym in enumerate(s):
        if sym not in spec.index:
            raise ForeignSymbol(f"foreign symbol {sym!r} at position {pos} for {spec.name}")


def run(spec: LanguageSpec, s: str) -> Iterator[tuple]:
    """Yield the machine state after each symbol of ``s``.

    For Dyck-k (k >= 2) the state is the stack as a tuple of pair indices (top
    last); otherwise it is the tuple of per-pair counters.  Raises
    :class:`DeadPrefix` at the first step where a closing has nothing to match.
    """
    _check_symbols(spec, s)
    k = spec.k
    pair_of = spec.pair_of
    if spec.is_counter_language:
        counters = [0] * k
        for pos, sym in enumerate(s):
            i = pair_of[sym]
            if spec.is_opening(sym):
                counters[i] += 1
            elif counters[i] == 0:
                raise DeadPrefix(f"dead prefix {s[:pos + 1]!r}: unmatched {sym!r} at position {pos}")
            else:
                counters[i] -= 1
            yield tuple(counters)
    else:
        stack: list[int] = []
        for pos, sym in enumerate(s):
            i = pair_of[sym]
            if spec.is_opening(sym):
                stack.append(i)
            elif not stack or stack[-1] != i:
                raise DeadPrefix(f"dead prefix {s[:pos + 1]!r}: {sym!r} at position {pos} does not match")
            else:
                stack.pop()
            yield tuple(stack)


def final_state(spec: LanguageSpec, s: str) -> tuple:
    state = tuple([0] * spec.k) if spec.is_counter_language else ()
    for state in run(spec, s):
        pass
    return state


def _accepting(spec: LanguageSpec, state: tuple) -> bool:
    if spec.is_counter_language:
        return not any(state)
    return not state  # stack entries are pair indices, and index 0 is falsy


def membership(spec: LanguageSpec, s: str) -> bool:
    try:
        state = final_state(spec, s)
    except DeadPrefix:
        return False
    return _accepting(spec, state)


def _allowed(spec: LanguageSpec, state: tuple) -> frozenset[str]:
    allowed = set(spec.openings)
    if spec.is_counter_language:
        allowed.update(spec.closings[i] for i, n in enumerate(state) if n > 0)
    elif state:
        allowed.add(spec.closings[state[-1]])
    return frozenset(allowed)


def next_symbols(spec: LanguageSpec, prefix: str) -> frozenset[str]:
    """Symbols that may follow ``prefix`` in some word of the language.

    Raises :class:`DeadPrefix` if no word starts with ``prefix``.
    """
    return _allowed(spec, final_state(spec, prefix))


def target_sequence(spec: LanguageSpec, s: str) -> list[frozenset[str]]:
    """Next-symbol sets after each prefix ``s[:1] ... s[:len(s)]`` of a word."""
    try:
        states = list(run(spec, s))
    except DeadPrefix as e:
        raise NotMember(f"{s!r} is not in {spec.name}: {e}") from None
    if states and not _accepting(spec, states[-1]):
        raise NotMember(f"{s!r} is not in {spec.name}: unbalanced at the end")
    return [_allowed(spec, st) for st in states]


# --- brute-force reference -------------------------------------------------
#
# Independent of the machines above: words are reduced by deleting adjacent
# matched pairs (for shuffle languages, inside each pair's projection), and
# continuations are searched exhaustively over the alphabet.

BRUTE_FORCE_LIMIT = 24


def _reduce(word: str, op: str, cl: str) -> str:
    pair = op + cl
    while pair in word:
        word = word.replace(pair, "")
    return word


def _reduced_key(spec: LanguageSpec, word: str) -> tuple[str, ...]:
    if spec.kind == DYCK:
        w = word
        while True:
            shorter = w
            for p in spec.pairs:
                shorter = shorter.replace(p.open_symbol + p.close_symbol, "")
            if shorter == w:
                return (w,)
            w = shorter
    return tuple(_reduce("".join(c for c in word if c in (p.open_symbol, p.close_symbol)),
                         p.open_symbol, p.close_symbol) for p in spec.pairs)


def _completable(spec: LanguageSpec, key: tuple[str, ...], budget: int, memo: dict) -> bool:
    if all(part == "" for part in key):
        return True
    # a closing left in a reduced form can never be cancelled by appending
    if any(c in spec.closings for part in key for c in part) or budget == 0:
        return False
    hit = memo.get((key, budget))
    if hit is not None:
        return hit
    joined = "".join(key)
    result = any(_completable(spec, _reduced_key(spec, joined + sym), budget - 1, memo)
                 for sym in spec.closings + spec.openings)
    memo[(key, budget)] = result
    return result


def brute_force_next_symbols(spec: LanguageSpec, prefix: str, horizon: int,
                             limit: int = BRUTE_FORCE_LIMIT) -> frozenset[str]:
    """Symbols ``a`` such that ``prefix + a`` completes to a word within ``horizon`` more symbols.

    Test oracle only.  Raises ``ValueError`` when ``len(prefix) + horizon``
    exceeds ``limit``.
    """
    if len(prefix) + horizon > limit:
        raise ValueError(f"budget exceeded: |prefix| + horizon = {len(prefix) + horizon} > {limit}")
    _check_symbols(spec, prefix)
    memo = _memo_for(spec)
    return frozenset(a for a in spec.alphabet
                     if _completable(spec, _reduced_key(spec, prefix + a), horizon, memo))


@lru_cache(maxsize=None)
def _memo_for(spec: LanguageSpec) -> dict:
    return {}


def brute_force_extendable(spec: LanguageSpec, prefix: str, horizon: int) -> bool:
    _check_symbols(spec, prefix)
    return _completable(spec, _reduced_key(spec, prefix), horizon, _memo_for(spec))


# --- depth and corpus statistics ------------------------------------------

def depth_profile(s: str, pair: ParenPair) -> list[int]:
    """Unmatched openings of ``pair`` after each prefix of ``s``."""
    depth = 0
    out = []
    for sym in s:
        if sym == pair.open_symbol:
            depth += 1
        elif sym == pair.close_symbol:
            depth -= 1
        out.append(depth)
    return out


def max_depth(spec: LanguageSpec, s: str) -> int:
    """Largest number of outstanding openings over all pairs together."""
    depth = best = 0
    for sym in s:
        depth += 1 if spec.is_opening(sym) else -1
        best = max(best, depth)
    return best


def corpus_stats(corpus: Corpus) -> dict[str, dict[int, int]]:
    lengths = Counter(len(s) for s in corpus.strings)
    depths = Counter(max_depth(corpus.spec, s) for s in corpus.strings)
    return {"length": dict(sorted(lengths.items())), "max_depth": dict(sorted(depths.items()))}
