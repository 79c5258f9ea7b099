"""Acceptance gate: one test per criterion, each printing a pass/fail line
and holding its runtime budget. Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import functools
import itertools
import json
import math
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from g2p_bridge.codec import (
    EXCLUDED_CHARS,
    IntermediateAlphabet,
    canonicalize,
    default_alphabet,
    from_phonemes,
    to_phonemes,
    validate_alphabet,
)
from g2p_bridge.corpus import CorpusEntry, HomographTag, augment, split_corpus
from g2p_bridge.corpus import split_at_non_ezafe, validate_entry
from g2p_bridge.metrics import (
    bleu_corpus,
    corpus_per,
    edit_ops,
    ezafe_prf,
    homograph_accuracy,
)
from g2p_bridge.model import (
    ModelConfig,
    TrainConfig,
    build_model,
    gradient_check,
    greedy_decode,
    train,
)
from g2p_bridge.synth import synthetic_corpus
from g2p_bridge.tokenizer import (
    SPECIAL_TOKENS,
    decode,
    encode,
    format_tokenizer,
    interleave,
    train_bpe,
)

TABLE = default_alphabet()


def _stopwatch(budget_s):
    start = time.time()

    def finish(criterion, description):
        elapsed = time.time() - start
        status = "PASS" if elapsed < budget_s else "FAIL"
        print(f"{status} criterion {criterion}: {description} "
              f"({elapsed:.1f}s < {budget_s}s)")
        assert elapsed < budget_s, f"criterion {criterion} exceeded {budget_s}s"

    return finish


def test_criterion_1_codec_bijectivity():
    done = _stopwatch(5)
    rng = random.Random(20250808)
    chars = sorted(TABLE.image)
    for _ in range(10_000):
        words = [
            "".join(rng.choice(chars) for _ in range(rng.randint(1, 9)))
            for _ in range(rng.randint(1, 5))
        ]
        s = " ".join(words)
        seq = to_phonemes(s, TABLE)
        assert from_phonemes(seq, TABLE) == s
        assert to_phonemes(from_phonemes(seq, TABLE), TABLE) == seq

    for bad in sorted(EXCLUDED_CHARS):
        table = IntermediateAlphabet({"p_bad": bad, "p_ok": "a"})
        result = validate_alphabet(table)
        assert not result.ok
        assert any(v.code == "ExcludedCharacterUsed" for v in result.violations)

    assert canonicalize("khaab", TABLE) == "ķAb"
    done(1, "10k roundtrips, excluded-set rejection, khaab anchor")


def test_criterion_2_tokenizer_constraints(toy_corpus):
    done = _stopwatch(30)
    lines = interleave([e.fa for e in toy_corpus.entries],
                       [e.pg for e in toy_corpus.entries])

    tok_a = train_bpe(lines, vocab_limit=500, min_frequency=2, max_token_len=3)
    tok_b = train_bpe(lines, vocab_limit=500, min_frequency=2, max_token_len=3)
    assert format_tokenizer(tok_a) == format_tokenizer(tok_b)

    inverse = {i: t for t, i in tok_a.vocab.items()}
    specials = set(SPECIAL_TOKENS)
    for line in lines:
        ids = encode(tok_a, line)
        for i in ids:
            token = inverse[i]
            if token not in specials:
                assert len(token) <= 3, token
        assert decode(tok_a, ids) == line

    oracle = train_bpe(["abab"] * 200, vocab_limit=100, min_frequency=100,
                       max_token_len=3)
    assert oracle.merges == [("a", "b")]
    ab = oracle.vocab["ab"]
    assert encode(oracle, "abab") == [ab, ab]
    done(2, "toy-corpus BPE: length cap, determinism, roundtrip, abab oracle")


def test_criterion_3_augmentation_integrity():
    done = _stopwatch(10)
    corpus = synthetic_corpus(1000, seed=31)
    rng = random.Random(32)
    for entry in corpus.entries:
        max_words = rng.randint(1, 4)
        frags = split_at_non_ezafe(entry, max_words)
        assert " ".join(f.pg for f in frags) == entry.pg
        assert " ".join(f.fa for f in frags) == entry.fa
        cut = 0
        for f in frags[:-1]:
            cut += len(f.words)
            assert (cut - 1) not in entry.ezafe

    small = split_corpus(synthetic_corpus(100, seed=33), val_n=10, test_n=10,
                         seed=33)
    grown = augment(small, target_size=315, seed=34)
    assert len(grown.train) == 315
    for entry in grown.entries:
        assert validate_entry(entry) == [], entry
    done(3, "1k split integrity checks, 100->315 augment invariant-clean")


def test_criterion_4_gradient_correctness():
    done = _stopwatch(120)
    shapes = [
        dict(encoder_layers=1, decoder_layers=1, attention_heads=2,
             feedforward_dim=32, hidden_size=16, pos_embedding_dim=8),
        dict(encoder_layers=2, decoder_layers=1, attention_heads=4,
             feedforward_dim=48, hidden_size=24, pos_embedding_dim=12),
        dict(encoder_layers=1, decoder_layers=2, attention_heads=2,
             feedforward_dim=64, hidden_size=32, pos_embedding_dim=16),
    ]
    pairs = [([5, 6, 7, 8], [9, 10, 11]), ([6, 5], [10, 9, 12, 13])]
    for i, shape in enumerate(shapes):
        cfg32 = ModelConfig(vocab_size=18 + i, dropout=0.1,
                            max_sequence_length=16, dtype="float32", **shape)
        res32 = gradient_check(build_model(cfg32, seed=40 + i), pairs,
                               epsilon=1e-5, n_samples=220, seed=i)
        assert res32.max_rel_error < 1e-3, (i, res32.max_rel_error)

        cfg64 = ModelConfig(vocab_size=18 + i, dropout=0.1,
                            max_sequence_length=16, dtype="float64", **shape)
        res64 = gradient_check(build_model(cfg64, seed=40 + i), pairs,
                               epsilon=1e-5, n_samples=220, seed=i)
        assert res64.max_rel_error < 1e-6, (i, res64.max_rel_error)
    done(4, "finite differences: three configs, <1e-3 at f32, <1e-6 at f64")


def test_criterion_5_overfit_training():
    done = _stopwatch(600)
    corpus = synthetic_corpus(64, seed=64)
    lines = interleave([e.fa for e in corpus.entries],
                       [e.pg for e in corpus.entries])
    tok = train_bpe(lines, vocab_limit=400, min_frequency=2, max_token_len=3)
    pairs = [(encode(tok, e.fa), encode(tok, e.pg)) for e in corpus.entries]

    cfg = ModelConfig(
        vocab_size=len(tok.vocab), encoder_layers=2, decoder_layers=2,
        attention_heads=4, feedforward_dim=256, hidden_size=64,
        pos_embedding_dim=32, dropout=0.0, max_sequence_length=48,
        dtype="float32",
    )
    model = build_model(cfg, seed=11)
    tc = TrainConfig(batch_size=16, learning_rate=2e-3, max_epochs=200,
                     early_stop_patience=200, seed=5)
    result = train(model, pairs, tc, pairs)
    assert len(result.history) <= 200

    refs, hyps = [], []
    for entry in corpus.entries:
        decoded = greedy_decode(result.model, encode(tok, entry.fa), max_len=40)
        hyps.append(decode(tok, decoded.ids))
        refs.append(entry.pg)
    _, rate = corpus_per(refs, hyps)
    assert rate < 0.02, f"train PER {rate:.4f}"

    # plateau fixture: unlearnable validation targets trip early stopping
    rng = np.random.default_rng(3)
    noise_val = [
        (s, [int(x) for x in rng.integers(4, len(tok.vocab), size=len(t))])
        for s, t in pairs[:8]
    ]
    plateau = train(
        build_model(cfg, seed=12), pairs,
        TrainConfig(batch_size=16, learning_rate=2e-3, max_epochs=50,
                    early_stop_patience=3, seed=6),
        noise_val,
    )
    assert plateau.stopped_early
    assert len(plateau.history) < 50
    done(5, f"64-sentence overfit: train PER {rate:.4f} < 2%, early stop fires")


@functools.lru_cache(maxsize=None)
def _brute_distance(ref: str, hyp: str) -> int:
    if not ref:
        return len(hyp)
    if not hyp:
        return len(ref)
    step = 0 if ref[0] == hyp[0] else 1
    return min(
        _brute_distance(ref[1:], hyp[1:]) + step,
        _brute_distance(ref[1:], hyp) + 1,
        _brute_distance(ref, hyp[1:]) + 1,
    )


def test_criterion_6_metrics_oracle_equivalence():
    done = _stopwatch(60)
    # exhaustive tier: every pair with both lengths <= 4 over 4 symbols
    seqs4 = ["".join(p) for L in range(5)
             for p in itertools.product("abcd", repeat=L)]
    assert len(seqs4) == 341
    for ref in seqs4:
        for hyp in seqs4:
            ops = edit_ops(ref, hyp)
            assert ops.total_edits == _brute_distance(ref, hyp)
            assert ops.total_ref == len(ref)
    # exhaustive deep tier: lengths 5 and 6 on both sides over 2 symbols
    seqs2 = ["".join(p) for L in (5, 6)
             for p in itertools.product("ab", repeat=L)]
    assert len(seqs2) == 96
    for ref in seqs2:
        for hyp in seqs2:
            assert edit_ops(ref, hyp).total_edits == _brute_distance(ref, hyp)

    refs = [["a", "b", "c", "d", "e"]]
    hyps = [["a", "b", "c", "d"]]
    assert bleu_corpus(refs, hyps) == pytest.approx(math.exp(-0.25), abs=1e-9)

    identical = [["a", "b", "c", "d"], ["b", "c", "d", "a", "b"]]
    assert bleu_corpus(identical, [list(s) for s in identical]) == 1.0
    _, rate = corpus_per(["abcd", "bcdab"], ["abcd", "bcdab"])
    assert rate == 0.0
    done(6, "PER == exhaustive alignment oracle; BLEU anchors exact")


def test_criterion_7_ezafe_homograph_scorers():
    done = _stopwatch(5)

    def entry(pg, ezafe=(), homographs=(), id="e"):
        return CorpusEntry(id=id, fa=" ".join("ف" for _ in pg.split()), pg=pg,
                           ezafe=frozenset(ezafe), homographs=tuple(homographs))

    refs = [
        entry("ketAbe ķUb ast", ezafe={0}, id="a"),
        entry("dUste man Amad", ezafe={0}, id="b"),
        entry("šabe sard bUd", ezafe={0}, id="c"),
        entry("rAhe deraz ast", ezafe={0}, id="d"),
    ]
    perfect = ezafe_prf(refs, [r.pg for r in refs])
    assert (perfect.precision, perfect.recall, perfect.f1) == (1.0, 1.0, 1.0)

    dropped = [r.pg for r in refs]
    dropped[0] = "ketAb ķUb ast"
    score = ezafe_prf(refs, dropped)
    assert score.precision == 1.0
    assert score.recall == pytest.approx(3 / 4)  # (E-1)/E with E = 4

    hrefs = [
        entry("babr Amad", homographs=[HomographTag(0, "ب", "tiger")], id="h0"),
        entry("bebar kif", homographs=[HomographTag(0, "ب", "carry")], id="h1"),
        entry("gol bUd", homographs=[HomographTag(0, "گ", "flower")], id="h2"),
        entry("gel bUd", homographs=[HomographTag(0, "گ", "mud")], id="h3"),
    ]
    assert homograph_accuracy(hrefs, [r.pg for r in hrefs]) == 1.0
    wrong = [r.pg for r in hrefs]
    wrong[3] = "gol bUd"  # wrong reading substituted
    assert homograph_accuracy(hrefs, wrong) == 0.75
    done(7, "hand-counted Ezafe recall (E-1)/E and homograph 3-of-4 exact")


def _run_cli(args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "g2p_bridge", *args],
        capture_output=True, text=True, **kwargs,
    )


def _run_pipeline(workdir, toy_corpus_path):
    split = workdir / "split.jsonl"
    tok = workdir / "tok.txt"
    ckpt = workdir / "model.ckpt"
    report = workdir / "report.json"

    steps = [
        ["split", "--corpus", toy_corpus_path, "--out", str(split),
         "--val-n", "10", "--test-n", "10", "--seed", "5"],
        ["train-tokenizer", "--corpus", str(split), "--out", str(tok),
         "--vocab-limit", "300", "--min-frequency", "2", "--seed", "5"],
        ["train", "--corpus", str(split), "--tokenizer", str(tok),
         "--out", str(ckpt), "--encoder-layers", "2", "--decoder-layers", "2",
         "--heads", "4", "--hidden-size", "64", "--ffn-dim", "128",
         "--pos-dim", "32", "--dropout", "0.1", "--max-seq-len", "64",
         "--batch-size", "16", "--lr", "1e-3", "--epochs", "20",
         "--patience", "20", "--seed", "7"],
    ]
    for step in steps:
        proc = _run_cli(step)
        assert proc.returncode == 0, (step[0], proc.stderr)

    proc = _run_cli(
        ["convert", "--model", str(ckpt), "--tokenizer", str(tok)],
        input="کتاب خوب است\n",
    )
    assert proc.returncode == 0, proc.stderr
    converted = proc.stdout

    proc = _run_cli([
        "evaluate", "--model", str(ckpt), "--tokenizer", str(tok),
        "--corpus", str(split), "--report", str(report),
        "--bleu-order", "2", "--seed", "7",
    ])
    assert proc.returncode == 0, proc.stderr
    return converted, report.read_bytes()


def test_criterion_8_end_to_end_cli(tmp_path, toy_corpus_path):
    done = _stopwatch(900)
    run_a = tmp_path / "a"
    run_b = tmp_path / "b"
    run_a.mkdir()
    run_b.mkdir()
    converted_a, report_a = _run_pipeline(run_a, toy_corpus_path)
    converted_b, report_b = _run_pipeline(run_b, toy_corpus_path)

    doc = json.loads(report_a.decode("utf-8"))
    for key in ("meta", "bleu", "per", "ezafe_precision", "ezafe_recall",
                "ezafe_f1", "homograph_accuracy", "counts", "sentences"):
        assert key in doc, key
    for key in ("sentences", "phonemes", "homograph_occurrences",
                "ezafe_scorable_words", "alignment_mismatches"):
        assert key in doc["counts"], key
    assert isinstance(doc["bleu"], float) and 0.0 <= doc["bleu"] <= 1.0
    assert isinstance(doc["per"], float) and doc["per"] >= 0.0
    assert {"tool_version", "seed", "config_digest"} <= set(doc["meta"])
    assert len(doc["sentences"]) == doc["counts"]["sentences"] == 10
    for record in doc["sentences"]:
        assert {"id", "ref", "hyp", "edits", "per"} <= set(record)

    assert converted_a == converted_b
    assert report_a == report_b
    done(8, "CLI pipeline exit 0, schema-valid report, identical reruns")
