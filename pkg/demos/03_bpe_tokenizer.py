"""Train the length-capped BPE tokenizer on interleaved Persian/Pinglish
lines and inspect what it learned.

Run: python demos/03_bpe_tokenizer.py
"""

from collections import Counter

from g2p_bridge.synth import synthetic_corpus
from g2p_bridge.tokenizer import (
    SPECIAL_TOKENS,
    decode,
    encode,
    interleave,
    train_bpe,
)

corpus = synthetic_corpus(200, seed=3)
lines = interleave([e.fa for e in corpus.entries],
                   [e.pg for e in corpus.entries])
print("training lines:", len(lines), "(alternating fa / pg)")

tok = train_bpe(lines, vocab_limit=400, min_frequency=3, max_token_len=3)
print("vocabulary:", len(tok.vocab), "tokens,", len(tok.merges), "merges")
print("first merges:", tok.merges[:8])
print()

# No learned token is longer than 3 characters: the merge loop refuses any
# pair whose concatenation would break the cap.
lengths = Counter(
    len(t) for t in tok.vocab if t not in SPECIAL_TOKENS
)
print("token length distribution:", dict(sorted(lengths.items())))
assert max(lengths) <= 3
print()

for line in lines[:4]:
    ids = encode(tok, line)
    inverse = {i: t for t, i in tok.vocab.items()}
    print(f"{line!r}")
    print("  ->", [inverse[i] for i in ids])
    assert decode(tok, ids) == line
