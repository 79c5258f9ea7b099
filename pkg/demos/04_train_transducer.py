"""Build, verify, and train a small transducer on the synthetic corpus,
then decode with greedy and beam search.

Run: python demos/04_train_transducer.py  (about a minute on a laptop CPU)
"""

from g2p_bridge.metrics import corpus_per
from g2p_bridge.model import (
    ModelConfig,
    TrainConfig,
    beam_decode,
    build_model,
    gradient_check,
    greedy_decode,
    parameter_count,
    train,
)
from g2p_bridge.synth import synthetic_corpus
from g2p_bridge.tokenizer import decode, encode, interleave, train_bpe

corpus = synthetic_corpus(64, seed=64)
lines = interleave([e.fa for e in corpus.entries],
                   [e.pg for e in corpus.entries])
tok = train_bpe(lines, vocab_limit=400, min_frequency=2, max_token_len=3)

cfg = ModelConfig(
    vocab_size=len(tok.vocab), encoder_layers=2, decoder_layers=2,
    attention_heads=4, feedforward_dim=256, hidden_size=64,
    pos_embedding_dim=32, dropout=0.0, max_sequence_length=48,
    dtype="float32",
)
model = build_model(cfg, seed=11)
print("parameters:", parameter_count(model))

# Before training: confirm the hand-written backward pass against central
# finite differences on a random coordinate subsample.
check = gradient_check(model, [([5, 6, 7], [8, 9]), ([6, 5], [9, 8, 10])],
                       n_samples=150)
print(f"gradient check: max relative error {check.max_rel_error:.2e} "
      f"(worst tensor {check.worst_param})")

pairs = [(encode(tok, e.fa), encode(tok, e.pg)) for e in corpus.entries]
tc = TrainConfig(batch_size=16, learning_rate=2e-3, max_epochs=150,
                 early_stop_patience=150, seed=5)
result = train(model, pairs, tc, pairs)
print(f"trained {len(result.history)} epochs; "
      f"final loss {result.history[-1].train_loss:.4f}")
print()

refs, hyps = [], []
for entry in corpus.entries[:6]:
    out = greedy_decode(result.model, encode(tok, entry.fa), max_len=40)
    hyp = decode(tok, out.ids)
    print(f"{entry.fa}  ->  {hyp}   (ref: {entry.pg})")
    refs.append(entry.pg)
    hyps.append(hyp)

_, rate = corpus_per([e.pg for e in corpus.entries],
                     [decode(tok, greedy_decode(result.model,
                                                encode(tok, e.fa),
                                                max_len=40).ids)
                      for e in corpus.entries])
print(f"\ntrain-split phoneme error rate: {rate:.4f}")

# Beam search is a quality knob; width 1 is exactly greedy.
src = encode(tok, corpus.entries[0].fa)
g = greedy_decode(result.model, src, max_len=40)
b = beam_decode(result.model, src, beam_width=4, max_len=40)
print("beam(4) matches greedy here:", b.ids == g.ids)
