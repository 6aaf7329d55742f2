"""Mapping Dyck-n words into Dyck-2 while keeping membership.

Each parenthesis is spelled as m = ceil(log2 n) symbols over ( [ ) ]; openings
write the pair index in binary, closings write it reversed.

Run: python demos/02_dyck_n_to_dyck_2.py
"""
import itertools

from dyckcount import dyck, membership, reduce_dyck_n_to_2

for n, word in [(3, "[]"), (3, "{}"), (4, "⟨⟩"), (6, "(⌊⌋)⌈⌉")]:
    print(f"Dyck-{n}: {word!r:>10} -> {reduce_dyck_n_to_2(word, n)!r}")

# Quick check over every Dyck-3 string of length 6.
spec = dyck(3)
agree = sum(membership(spec, s) == membership(dyck(2), reduce_dyck_n_to_2(s, 3))
            for s in map("".join, itertools.product(spec.alphabet, repeat=6)))
print(f"membership preserved on {agree} of {6 ** 6} strings")
