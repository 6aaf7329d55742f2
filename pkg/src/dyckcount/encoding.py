"""Vector encodings at the network boundary, presentation codes, and the Dyck-n to Dyck-2 map."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable

import numpy as np

from .languages import PAIR_SYMBOLS, LanguageSpec, dyck
from .oracles import ForeignSymbol, target_sequence

THRESHOLD = 0.5

# presentation weight of each closing symbol; openings weigh 0
CODE_WEIGHTS = {close: 1 << i for i, (_, close) in enumerate(PAIR_SYMBOLS)}


def encode_one_hot(symbol: str, spec: LanguageSpec) -> np.ndarray:
    try:
        i = spec.index[symbol]
    except KeyError:
        raise ForeignSymbol(f"foreign symbol {symbol!r} for {spec.name}") from None
    v = np.zeros(len(spec.alphabet))
    v[i] = 1.0
    return v


def encode_indices(s: str, spec: LanguageSpec) -> np.ndarray:
    """Alphabet indices of the symbols of ``s`` (the compact form of its one-hot rows)."""
    try:
        return np.array([spec.index[c] for c in s], dtype=np.int64)
    except KeyError as e:
        raise ForeignSymbol(f"foreign symbol {e.args[0]!r} for {spec.name}") from None


def decode_prediction(vector, spec: LanguageSpec, threshold: float = THRESHOLD) -> frozenset[str]:
    """Symbols whose output is strictly above ``threshold``."""
    vector = np.asarray(vector)
    if vector.shape != (len(spec.alphabet),):
        raise ValueError(f"expected a vector of dimension {len(spec.alphabet)}, got shape {vector.shape}")
    return frozenset(spec.alphabet[i] for i in np.flatnonzero(vector > threshold))


def k_hot(target: Iterable[str], spec: LanguageSpec) -> np.ndarray:
    v = np.zeros(len(spec.alphabet))
    for sym in target:
        v[spec.index[sym]] = 1.0
    return v


def target_matrix(s: str, spec: LanguageSpec) -> np.ndarray:
    """Stacked k-hot targets of a word, shape ``(len(s), D)``."""
    out = np.zeros((len(s), len(spec.alphabet)))
    for t, allowed in enumerate(target_sequence(spec, s)):
        for sym in allowed:
            out[t, spec.index[sym]] = 1.0
    return out


def presentation_code(target: Iterable[str]) -> int:
    return sum(CODE_WEIGHTS.get(sym, 0) for sym in target)


def code_to_set(code: int, spec: LanguageSpec) -> frozenset[str]:
    if code < 0 or code >> spec.k:
        raise ValueError(f"code {code} uses closings beyond the {spec.k} pairs of {spec.name}")
    return frozenset(spec.openings) | {c for c in spec.closings if code & CODE_WEIGHTS[c]}


def codes(spec: LanguageSpec, s: str) -> list[int]:
    """Presentation codes of the targets of a word."""
    return [presentation_code(t) for t in target_sequence(spec, s)]


def reduction_width(n: int) -> int:
    """Symbols per encoded parenthesis: ``max(1, ceil(log2 n))``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return max(1, math.ceil(math.log2(n)))


def reduce_symbol(pair_index: int, opening: bool, n: int) -> str:
    """Image of the parenthesis of pair ``pair_index`` (0-based) under the Dyck-n -> Dyck-2 map.

    Openings spell the m-bit binary of the index with ``(`` for 0 and ``[``
    for 1; closings spell the reversed bits with ``)`` and ``]``.
    """
    m = reduction_width(n)
    if not 0 <= pair_index < n:
        raise ValueError(f"pair index {pair_index} out of range for n={n}")
    bits = format(pair_index, f"0{m}b")
    if opening:
        return bits.replace("0", "(").replace("1", "[")
    return bits[::-1].replace("0", ")").replace("1", "]")


@lru_cache(maxsize=None)
def _reduction_table(n: int) -> dict[int, str]:
    spec = dyck(n)
    return {ord(sym): reduce_symbol(spec.pair_of[sym], spec.is_opening(sym), n) for sym in spec.alphabet}


def reduce_dyck_n_to_2(s: str, n: int) -> str:
    """Map a string over the Dyck-n alphabet to one over ``( [ ) ]`` preserving membership."""
    table = _reduction_table(n)
    for pos, sym in enumerate(s):
        if ord(sym) not in table:
            raise ForeignSymbol(f"foreign symbol {sym!r} at position {pos} for Dyck-{n}")
    return s.translate(table)
