"""Corpus handling: synthetic data, deterministic splits, and the
Ezafe-aware merge/split augmentation.

Run: python demos/02_corpus_augmentation.py
"""

from g2p_bridge.corpus import (
    augment,
    merge_entries,
    split_at_non_ezafe,
    split_corpus,
)
from g2p_bridge.synth import synthetic_corpus

corpus = synthetic_corpus(100, seed=7)
sample = corpus.entries[0]
print("sample entry:")
print("  fa:", sample.fa)
print("  pg:", sample.pg)
print("  ezafe:", sorted(sample.ezafe), "homographs:", sample.homographs)
print()

labeled = split_corpus(corpus, val_n=10, test_n=10, seed=7)
print(f"split: {len(labeled.train)} train / {len(labeled.val)} val / "
      f"{len(labeled.test)} test")
print()

# Merging concatenates two same-register entries and shifts annotations.
a, b = labeled.train[0], labeled.train[1]
if a.register != b.register:
    b = next(e for e in labeled.train[1:] if e.register == a.register)
merged = merge_entries(a, b)
print("merged:", merged.pg, "| ezafe:", sorted(merged.ezafe))

# Splitting cuts only where no Ezafe binds a word to its successor, so the
# linking vowel never dangles at a fragment edge.
fragments = split_at_non_ezafe(merged, max_words=2)
print("fragments:", [f.pg for f in fragments])
assert " ".join(f.pg for f in fragments) == merged.pg
print()

# The augmenter alternates seeded merges and splits until the target size.
grown = augment(labeled, target_size=252, seed=11)
print(f"augmented train split: {len(labeled.train)} -> {len(grown.train)} "
      f"(factor {len(grown.train) / len(labeled.train):.2f})")
print("val/test untouched:",
      {e.id for e in grown.val} == {e.id for e in labeled.val}
      and {e.id for e in grown.test} == {e.id for e in labeled.test})
