"""Sampling corpora and reading off next-symbol targets.

Run: python demos/01_languages_and_oracles.py
"""
from dyckcount import build_task_splits, dyck, membership, shuffle, target_sequence
from dyckcount.encoding import presentation_code
from dyckcount.oracles import corpus_stats, depth_profile

# A miniature Dyck-1 corpus: train and short-test words of length 2..20, long-test 22..40.
splits = build_task_splits("dyck1", seed=0,
                           sizes={"train": 200, "short_test": 50, "long_test": 50},
                           windows={"train": (2, 20), "short_test": (2, 20), "long_test": (22, 40)})
for name, corpus in splits.items():
    stats = corpus_stats(corpus)
    print(f"{name:10s} {len(corpus):4d} words, lengths {min(stats['length'])}-{max(stats['length'])}, "
          f"deepest nesting {max(stats['max_depth'])}")
print("first training words:", splits["train"].strings[:5])

# Targets are sets of symbols that may come next; the code sums closing weights.
word = "(())()()"
print(word, [presentation_code(t) for t in target_sequence(dyck(1), word)])

# The same word can be read in Dyck-2 or in Shuffle-2, and the targets differ.
word = "([])"
for spec in (dyck(2), shuffle(2)):
    print(spec.name, [presentation_code(t) for t in target_sequence(spec, word)])

# Crossed pairs are fine for a shuffle language but not for Dyck-2.
print("([)] in Shuffle-2:", membership(shuffle(2), "([)]"), " in Dyck-2:", membership(dyck(2), "([)]"))

# Per-pair depth: the quantity a counting network has to track.
word = "[{()}]⟨⌈⌉⟩"
for pair in shuffle(6).pairs:
    print(pair.open_symbol + pair.close_symbol, depth_profile(word, pair))
