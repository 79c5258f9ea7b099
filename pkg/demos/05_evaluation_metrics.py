"""The four metric families on hand-perturbed hypotheses: corpus BLEU,
phoneme error rate, Ezafe detection P/R/F1, and homograph accuracy.

Run: python demos/05_evaluation_metrics.py
"""

from g2p_bridge.corpus import CorpusEntry, HomographTag
from g2p_bridge.metrics import (
    bleu_corpus,
    corpus_per,
    ezafe_prf,
    homograph_accuracy,
    score_corpus,
)


def entry(pg, ezafe=(), homographs=(), id="e"):
    return CorpusEntry(id=id, fa=" ".join("ف" for _ in pg.split()), pg=pg,
                       ezafe=frozenset(ezafe), homographs=tuple(homographs))


refs = [
    entry("ketAbe ķUb ast", ezafe={0}, id="a"),
    entry("babre vahši Amad", ezafe={0},
          homographs=[HomographTag(0, "ببر", "tiger")], id="b"),
    entry("gel bUd", homographs=[HomographTag(0, "گل", "mud")], id="c"),
]

perfect = [r.pg for r in refs]
print("perfect hypotheses:")
result = score_corpus(refs, perfect, bleu_order=2)
print("  BLEU", result.report.bleu, "| PER", result.report.per,
      "| Ezafe F1", result.report.ezafe_f1,
      "| homographs", result.report.homograph_accuracy)
print()

# Drop one Ezafe vowel: recall loses exactly one of two reference marks.
flawed = list(perfect)
flawed[0] = "ketAb ķUb ast"
ez = ezafe_prf(refs, flawed)
print(f"dropped one Ezafe  -> precision {ez.precision:.2f}, "
      f"recall {ez.recall:.2f}, f1 {ez.f1:.3f}")

# Swap a homograph reading: 1 of 2 occurrences now wrong.
flawed = list(perfect)
flawed[2] = "gol bUd"
print("wrong homograph    -> accuracy",
      homograph_accuracy(refs, flawed))

# A single substituted character, pooled over the whole corpus.
flawed = list(perfect)
flawed[1] = "babre vahšy Amad"
ops, rate = corpus_per(perfect, flawed)
print(f"one wrong phoneme  -> corpus PER {rate:.4f} "
      f"({ops.total_edits} edit over {ops.total_ref} reference phonemes)")

# BLEU's brevity penalty: dropping the last word of a 5-token sentence.
print("brevity penalty    -> BLEU",
      round(bleu_corpus([["a", "b", "c", "d", "e"]],
                        [["a", "b", "c", "d"]]), 6))
