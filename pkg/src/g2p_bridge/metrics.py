"""Evaluation: corpus BLEU with brevity penalty, phoneme error rate from a
minimal edit alignment, Ezafe detection precision/recall/F1, and homograph
reading accuracy, pooled into one report.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .codec import IntermediateAlphabet, PhonemeSequence, default_alphabet
from .corpus import CorpusEntry
from .errors import (
    EmptyHypothesisCorpus,
    EmptyReference,
    LengthMismatch,
    NoHomographOccurrences,
)


# -- edit distance / PER -------------------------------------------------------

@dataclass(frozen=True)
class EditOps:
    insertions: int
    deletions: int
    substitutions: int
    total_ref: int

    @property
    def total_edits(self) -> int:
        return self.insertions + self.deletions + self.substitutions


def edit_ops(ref: Sequence, hyp: Sequence) -> EditOps:
    """Minimal-cost alignment counts under unit insert/delete/substitute costs.

    Backtrace prefers diagonal, then deletion, then insertion, so the split
    between I/Del/S is deterministic (the total is the Levenshtein distance
    either way).
    """
    m, n = len(ref), len(hyp)
    dist = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dist[i][0] = i
    for j in range(1, n + 1):
        dist[0][j] = j
    for i in range(1, m + 1):
        row = dist[i]
        prev = dist[i - 1]
        ri = ref[i - 1]
        for j in range(1, n + 1):
            cost = 0 if ri == hyp[j - 1] else 1
            row[j] = min(prev[j - 1] + cost, prev[j] + 1, row[j - 1] + 1)

    ins = dels = subs = 0
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            if dist[i][j] == dist[i - 1][j - 1] + cost:
                subs += cost
                i -= 1
                j -= 1
                continue
        if i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            dels += 1
            i -= 1
            continue
        ins += 1
        j -= 1
    return EditOps(insertions=ins, deletions=dels, substitutions=subs, total_ref=m)


def per(ref: PhonemeSequence, hyp: PhonemeSequence) -> tuple[EditOps, float]:
    """Phoneme error rate: (I + Del + S) / reference length.

    Word-boundary markers take part in the alignment, so dropped or inserted
    word breaks (an unvoiced Ezafe merging two words, say) count as edits.
    """
    ops = edit_ops(tuple(ref), tuple(hyp))
    if ops.total_ref == 0:
        raise EmptyReference("reference has no phonemes")
    return ops, ops.total_edits / ops.total_ref


def _per_tokens(s: str, unit: str, count_spaces: bool):
    if unit == "word":
        return s.split()
    if count_spaces:
        return s
    return s.replace(" ", "")


def per_strings(
    ref_pg: str,
    hyp_pg: str,
    unit: str = "char",
    count_spaces: bool = True,
) -> tuple[EditOps, float]:
    """PER over Pinglish strings; lenient counterpart of :func:`per` for raw
    model output, which may not be codec-valid.

    With the default toggles every character (separator included) is its own
    alignment token, which on valid strings coincides exactly with the
    phoneme-sequence alignment. ``unit="word"`` aligns whole words instead;
    ``count_spaces=False`` drops separators from the character alignment.
    """
    ops = edit_ops(_per_tokens(ref_pg, unit, count_spaces),
                   _per_tokens(hyp_pg, unit, count_spaces))
    if ops.total_ref == 0:
        raise EmptyReference("reference string is empty")
    return ops, ops.total_edits / ops.total_ref


def corpus_per(
    ref_strs: list[str],
    hyp_strs: list[str],
    unit: str = "char",
    count_spaces: bool = True,
) -> tuple[EditOps, float]:
    """Pool edit counts and reference lengths over a corpus, then divide."""
    if len(ref_strs) != len(hyp_strs):
        raise LengthMismatch(f"{len(ref_strs)} refs vs {len(hyp_strs)} hyps")
    ins = dels = subs = total = 0
    for r, h in zip(ref_strs, hyp_strs):
        ops = edit_ops(_per_tokens(r, unit, count_spaces),
                       _per_tokens(h, unit, count_spaces))
        ins += ops.insertions
        dels += ops.deletions
        subs += ops.substitutions
        total += ops.total_ref
    if total == 0:
        raise EmptyReference("no reference phonemes in corpus")
    pooled = EditOps(ins, dels, subs, total)
    return pooled, pooled.total_edits / total


# -- BLEU -----------------------------------------------------------------------

def bleu_corpus(
    refs: list[Sequence], hyps: list[Sequence], n: int = 4
) -> float:
    """Corpus-level BLEU: clipped n-gram precision pooled over the corpus,
    uniform weights 1/n, brevity penalty exp(1 - ref_len/hyp_len) when the
    hypothesis corpus is not longer than the reference corpus.

    No smoothing: any pooled precision of zero makes the score zero.
    """
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    if len(refs) != len(hyps):
        raise LengthMismatch(f"{len(refs)} refs vs {len(hyps)} hyps")
    if not hyps:
        raise EmptyHypothesisCorpus("no hypotheses")

    matched = [0] * n
    possible = [0] * n
    ref_len = 0
    hyp_len = 0
    for ref, hyp in zip(refs, hyps):
        ref = list(ref)
        hyp = list(hyp)
        ref_len += len(ref)
        hyp_len += len(hyp)
        for order in range(1, n + 1):
            hyp_ngrams = Counter(_ngrams(hyp, order))
            if not hyp_ngrams:
                continue
            ref_ngrams = Counter(_ngrams(ref, order))
            possible[order - 1] += sum(hyp_ngrams.values())
            matched[order - 1] += sum(
                min(c, ref_ngrams[g]) for g, c in hyp_ngrams.items()
            )

    if hyp_len == 0:
        raise EmptyHypothesisCorpus("all hypotheses are empty")
    if any(m == 0 or p == 0 for m, p in zip(matched, possible)):
        return 0.0
    log_score = sum(math.log(m / p) for m, p in zip(matched, possible)) / n
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * math.exp(log_score)


def _ngrams(tokens: list, order: int):
    return (
        tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1)
    )


# -- Ezafe scoring ---------------------------------------------------------------

@dataclass(frozen=True)
class EzafeScore:
    precision: float
    recall: float
    f1: float
    true_positive: int = 0
    false_positive: int = 0
    false_negative: int = 0
    true_negative: int = 0
    scorable_words: int = 0
    alignment_mismatches: int = 0


def _safe_prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    # Degenerate denominators: vacuously perfect only when nothing was missed
    # and nothing was invented.
    if tp + fp == 0:
        precision = 1.0 if fn == 0 else 0.0
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 1.0 if fp == 0 else 0.0
    else:
        recall = tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else (
        2 * precision * recall / (precision + recall)
    )
    return precision, recall, f1


def ezafe_prf(refs: list[CorpusEntry], hyps: list[str]) -> EzafeScore:
    """Score Ezafe detection word by word with the suffix-delta rule.

    A reference word's base form is the word with one trailing 'e' removed
    iff it is Ezafe-marked. A hypothesis word equal to base+'e' predicts
    Ezafe, equal to base predicts none, and anything else is an alignment
    mismatch excluded from the tally (as are whole sentences whose word
    counts disagree).
    """
    if len(refs) != len(hyps):
        raise LengthMismatch(f"{len(refs)} refs vs {len(hyps)} hyps")
    tp = fp = fn = tn = mismatches = scorable = 0
    for ref, hyp in zip(refs, hyps):
        rwords = ref.words
        hwords = hyp.split()
        if len(rwords) != len(hwords):
            mismatches += 1
            continue
        for i, rw in enumerate(rwords):
            labeled = i in ref.ezafe
            base = rw[:-1] if labeled else rw
            hw = hwords[i]
            if hw == base + "e":
                predicted = True
            elif hw == base:
                predicted = False
            else:
                mismatches += 1
                continue
            scorable += 1
            if labeled and predicted:
                tp += 1
            elif labeled:
                fn += 1
            elif predicted:
                fp += 1
            else:
                tn += 1
    precision, recall, f1 = _safe_prf(tp, fp, fn)
    return EzafeScore(
        precision=precision, recall=recall, f1=f1,
        true_positive=tp, false_positive=fp, false_negative=fn,
        true_negative=tn, scorable_words=scorable,
        alignment_mismatches=mismatches,
    )


# -- homograph accuracy -----------------------------------------------------------

def homograph_counts(
    refs: list[CorpusEntry], hyps: list[str]
) -> tuple[int, int]:
    """(correct, total) over annotated occurrences in scorable sentences."""
    if len(refs) != len(hyps):
        raise LengthMismatch(f"{len(refs)} refs vs {len(hyps)} hyps")
    correct = total = 0
    for ref, hyp in zip(refs, hyps):
        rwords = ref.words
        hwords = hyp.split()
        if len(rwords) != len(hwords):
            continue
        for tag in ref.homographs:
            i = tag.word_index
            rw, hw = rwords[i], hwords[i]
            if i in ref.ezafe:
                rw = rw[:-1]
                if hw.endswith("e"):
                    hw = hw[:-1]
            total += 1
            if rw == hw:
                correct += 1
    return correct, total


def homograph_accuracy(refs: list[CorpusEntry], hyps: list[str]) -> float:
    correct, total = homograph_counts(refs, hyps)
    if total == 0:
        raise NoHomographOccurrences("no annotated homographs in scorable sentences")
    return correct / total


# -- pooled report ------------------------------------------------------------------

@dataclass
class EvalCounts:
    sentences: int = 0
    phonemes: int = 0
    homograph_occurrences: int = 0
    ezafe_scorable_words: int = 0
    alignment_mismatches: int = 0


@dataclass
class EvalReport:
    bleu: float
    per: float
    ezafe_precision: float
    ezafe_recall: float
    ezafe_f1: float
    homograph_accuracy: float | None
    counts: EvalCounts = field(default_factory=EvalCounts)

    def to_dict(self) -> dict:
        return {
            "bleu": self.bleu,
            "per": self.per,
            "ezafe_precision": self.ezafe_precision,
            "ezafe_recall": self.ezafe_recall,
            "ezafe_f1": self.ezafe_f1,
            "homograph_accuracy": self.homograph_accuracy,
            "counts": {
                "sentences": self.counts.sentences,
                "phonemes": self.counts.phonemes,
                "homograph_occurrences": self.counts.homograph_occurrences,
                "ezafe_scorable_words": self.counts.ezafe_scorable_words,
                "alignment_mismatches": self.counts.alignment_mismatches,
            },
        }


@dataclass
class EvalResult:
    report: EvalReport
    sentences: list[dict]


def score_corpus(
    refs: list[CorpusEntry],
    hyp_strs: list[str],
    bleu_order: int = 4,
    char_bleu: bool = False,
    per_unit: str = "char",
    per_count_spaces: bool = True,
) -> EvalResult:
    """Compute every metric family for reference entries vs Pinglish strings."""
    if len(refs) != len(hyp_strs):
        raise LengthMismatch(f"{len(refs)} refs vs {len(hyp_strs)} hyps")
    if not refs:
        raise EmptyHypothesisCorpus("empty evaluation corpus")

    if char_bleu:
        bleu = bleu_corpus([list(r.pg) for r in refs],
                           [list(h) for h in hyp_strs], n=bleu_order)
    else:
        bleu = bleu_corpus([r.pg.split() for r in refs],
                           [h.split() for h in hyp_strs], n=bleu_order)
    pooled, rate = corpus_per([r.pg for r in refs], hyp_strs,
                              unit=per_unit, count_spaces=per_count_spaces)
    ezafe = ezafe_prf(refs, hyp_strs)
    hg_correct, hg_total = homograph_counts(refs, hyp_strs)

    sentences = []
    for ref, hyp in zip(refs, hyp_strs):
        ops, sent_rate = per_strings(ref.pg, hyp, unit=per_unit,
                                     count_spaces=per_count_spaces)
        sentences.append({
            "id": ref.id,
            "ref": ref.pg,
            "hyp": hyp,
            "edits": {
                "insertions": ops.insertions,
                "deletions": ops.deletions,
                "substitutions": ops.substitutions,
            },
            "per": sent_rate,
        })

    report = EvalReport(
        bleu=bleu,
        per=rate,
        ezafe_precision=ezafe.precision,
        ezafe_recall=ezafe.recall,
        ezafe_f1=ezafe.f1,
        homograph_accuracy=(hg_correct / hg_total) if hg_total else None,
        counts=EvalCounts(
            sentences=len(refs),
            phonemes=pooled.total_ref,
            homograph_occurrences=hg_total,
            ezafe_scorable_words=ezafe.scorable_words,
            alignment_mismatches=ezafe.alignment_mismatches,
        ),
    )
    return EvalResult(report=report, sentences=sentences)


def evaluate(
    model,
    tok,
    entries: list[CorpusEntry],
    alphabet: IntermediateAlphabet | None = None,
    beam_width: int = 1,
    max_len: int | None = None,
    bleu_order: int = 4,
    char_bleu: bool = False,
    per_unit: str = "char",
    per_count_spaces: bool = True,
) -> EvalResult:
    """Decode every test source with the model and score the output.

    ``homograph_accuracy`` is None when the corpus carries no annotated
    occurrences (direct calls to :func:`homograph_accuracy` raise instead).
    """
    from . import tokenizer as tokmod
    from .model.decoding import beam_decode, greedy_decode

    if not entries:
        raise EmptyHypothesisCorpus("empty test split")
    alphabet = alphabet or default_alphabet()
    limit = max_len or (model.config.max_sequence_length - 1)
    hyps: list[str] = []
    for entry in entries:
        src_ids = tokmod.encode(tok, entry.fa)
        if beam_width == 1:
            result = greedy_decode(model, src_ids, max_len=limit)
        else:
            result = beam_decode(model, src_ids, beam_width=beam_width, max_len=limit)
        hyps.append(tokmod.decode(tok, result.ids))
    return score_corpus(entries, hyps, bleu_order=bleu_order, char_bleu=char_bleu,
                        per_unit=per_unit, per_count_spaces=per_count_spaces)
