"""Command-line pipeline: normalize, canonicalize, lexicon check, split,
augment, train-tokenizer, train, convert, evaluate, inspect.

Exit codes: 0 success, 1 domain error, 2 usage error. Every artifact written
embeds the tool version, a digest of the resolved configuration, and the
seed, so any run can be reproduced from its outputs. ``G2P_BRIDGE_LOG``
selects the log level.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys

from . import __version__, codec, corpus as corpusmod, homograph as homographmod
from . import metrics as metricsmod, tokenizer as tokmod
from .errors import G2PBridgeError, InsufficientData
from .model import (
    ModelConfig,
    TrainConfig,
    build_model,
    checkpoint_meta,
    greedy_decode,
    beam_decode,
    load_checkpoint,
    save_checkpoint,
    train as train_model,
    verify_vocab_compatible,
)

log = logging.getLogger("g2p_bridge.cli")


def _config_digest(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _meta(seed, payload: dict) -> dict:
    return {
        "tool_version": __version__,
        "seed": seed,
        "config_digest": _config_digest(payload),
    }


def _alphabet(args):
    if getattr(args, "alphabet", None):
        return codec.load_alphabet(args.alphabet)
    return codec.default_alphabet()


def _lines_in(args):
    """Yield input lines lazily so stdin pipelines stream."""
    if getattr(args, "infile", None):
        with open(args.infile, encoding="utf-8") as fh:
            for line in fh:
                yield line.rstrip("\n")
    else:
        for line in sys.stdin:
            yield line.rstrip("\n")


def _emit(lines):
    for line in lines:
        sys.stdout.write(line + "\n")
        sys.stdout.flush()


# -- simple text commands --------------------------------------------------------

def cmd_normalize(args) -> int:
    _emit(codec.normalize_persian(line) for line in _lines_in(args))
    return 0


def cmd_canonicalize(args) -> int:
    table = _alphabet(args)
    _emit(codec.canonicalize(line, table) for line in _lines_in(args))
    return 0


def cmd_lexicon(args) -> int:
    lexicon = homographmod.load_lexicon(args.lexicon)
    problems = homographmod.validate_lexicon(lexicon, _alphabet(args))
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return 1
    print(f"lexicon ok: {len(lexicon.entries)} surface forms")
    return 0


# -- corpus commands ----------------------------------------------------------------

def cmd_split(args) -> int:
    table = _alphabet(args)
    corpus = corpusmod.load_corpus(args.corpus, table)
    out = corpusmod.split_corpus(corpus, args.val_n, args.test_n, args.seed)
    payload = {"command": "split", "val_n": args.val_n, "test_n": args.test_n}
    corpusmod.save_corpus(out, args.out, meta=_meta(args.seed, payload))
    print(
        f"split {len(out)} entries: train {len(out.train)} "
        f"val {len(out.val)} test {len(out.test)}"
    )
    return 0


def cmd_augment(args) -> int:
    table = _alphabet(args)
    corpus = corpusmod.load_corpus(args.corpus, table)
    before = len(corpus.train) if corpus.split_labels else len(corpus)
    out = corpusmod.augment(
        corpus, target_size=args.target_size, seed=args.seed,
        max_words=args.max_words, merge_ratio=args.merge_ratio,
    )
    payload = {
        "command": "augment",
        "target_size": args.target_size,
        "max_words": args.max_words,
        "merge_ratio": args.merge_ratio,
    }
    corpusmod.save_corpus(out, args.out, meta=_meta(args.seed, payload))
    after = len(out.train) if out.split_labels else len(out)
    print(f"augmented train split {before} -> {after}")
    return 0


# -- tokenizer ------------------------------------------------------------------------

def cmd_train_tokenizer(args) -> int:
    corpus = corpusmod.load_corpus(args.corpus, _alphabet(args))
    entries = corpus.train if corpus.split_labels else corpus.entries
    if not entries:
        raise InsufficientData("no training entries in corpus")
    lines = tokmod.interleave(
        [e.fa for e in entries], [e.pg for e in entries]
    )
    tok = tokmod.train_bpe(
        lines,
        vocab_limit=args.vocab_limit,
        min_frequency=args.min_frequency,
        max_token_len=args.max_token_len,
    )
    payload = {
        "command": "train-tokenizer",
        "vocab_limit": args.vocab_limit,
        "min_frequency": args.min_frequency,
        "max_token_len": args.max_token_len,
    }
    tok.meta = _meta(args.seed, payload)
    tokmod.save_tokenizer(tok, args.out)
    print(f"tokenizer: {len(tok.vocab)} tokens, {len(tok.merges)} merges")
    return 0


# -- model ------------------------------------------------------------------------------

def _load_json_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_train(args) -> int:
    corpus = corpusmod.load_corpus(args.corpus, _alphabet(args))
    if not corpus.split_labels:
        raise InsufficientData(
            "corpus has no split labels; run the split command first"
        )
    tok = tokmod.load_tokenizer(args.tokenizer)

    file_cfg = _load_json_config(args.config) if args.config else {}
    model_kwargs = dict(file_cfg.get("model", {}))
    train_kwargs = dict(file_cfg.get("train", {}))
    flag_map = {
        "encoder_layers": args.encoder_layers,
        "decoder_layers": args.decoder_layers,
        "attention_heads": args.heads,
        "feedforward_dim": args.ffn_dim,
        "hidden_size": args.hidden_size,
        "pos_embedding_dim": args.pos_dim,
        "dropout": args.dropout,
        "max_sequence_length": args.max_seq_len,
        "dtype": args.dtype,
    }
    for key, value in flag_map.items():
        if value is not None:
            model_kwargs[key] = value
    tflags = {
        "batch_size": args.batch_size,
        "learning_rate": args.lr,
        "max_epochs": args.epochs,
        "early_stop_patience": args.patience,
        "label_smoothing": args.label_smoothing,
    }
    for key, value in tflags.items():
        if value is not None:
            train_kwargs[key] = value
    train_kwargs["seed"] = args.seed

    model_kwargs["vocab_size"] = len(tok.vocab)
    mc = ModelConfig(**model_kwargs)
    tc = TrainConfig(**train_kwargs)

    def pairs_for(entries):
        return [
            (tokmod.encode(tok, e.fa), tokmod.encode(tok, e.pg)) for e in entries
        ]

    train_pairs = pairs_for(corpus.train)
    val_pairs = pairs_for(corpus.val)
    if not train_pairs or not val_pairs:
        raise InsufficientData("empty train or val split")

    model = build_model(mc, seed=args.seed)
    result = train_model(model, train_pairs, tc, val_pairs)
    payload = {"command": "train", "model": mc.to_dict(), "train": tc.to_dict()}
    save_checkpoint(result.model, args.out, meta=_meta(args.seed, payload))
    last = result.history[-1]
    print(
        f"trained {len(result.history)} epochs (best {result.best_epoch}"
        f"{', early stop' if result.stopped_early else ''}); "
        f"final train loss {last.train_loss:.4f}, val loss {last.val_loss:.4f}"
    )
    return 0


def cmd_convert(args) -> int:
    model = load_checkpoint(args.model)
    tok = tokmod.load_tokenizer(args.tokenizer)
    verify_vocab_compatible(model, tok)
    max_len = args.max_len or (model.config.max_sequence_length - 1)
    for line in _lines_in(args):
        text = codec.normalize_persian(line)
        src = tokmod.encode(tok, text)
        if args.beam > 1:
            result = beam_decode(model, src, beam_width=args.beam, max_len=max_len)
        else:
            result = greedy_decode(model, src, max_len=max_len)
        sys.stdout.write(tokmod.decode(tok, result.ids) + "\n")
        sys.stdout.flush()
    return 0


def cmd_evaluate(args) -> int:
    model = load_checkpoint(args.model)
    tok = tokmod.load_tokenizer(args.tokenizer)
    verify_vocab_compatible(model, tok)
    table = _alphabet(args)
    corpus = corpusmod.load_corpus(args.corpus, table)
    entries = corpus.subset(args.split) if corpus.split_labels else corpus.entries
    if not entries:
        raise InsufficientData(f"no entries in split {args.split!r}")
    result = metricsmod.evaluate(
        model, tok, entries, alphabet=table,
        beam_width=args.beam, max_len=args.max_len,
        bleu_order=args.bleu_order, char_bleu=args.char_bleu,
        per_unit=args.per_unit, per_count_spaces=not args.per_ignore_spaces,
    )
    payload = {
        "command": "evaluate",
        "split": args.split,
        "beam": args.beam,
        "bleu_order": args.bleu_order,
        "char_bleu": args.char_bleu,
        "per_unit": args.per_unit,
        "per_ignore_spaces": args.per_ignore_spaces,
    }
    doc = {
        "meta": _meta(args.seed, payload),
        **result.report.to_dict(),
        "sentences": result.sentences,
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
    r = result.report
    if args.format == "json":
        print(json.dumps(r.to_dict(), ensure_ascii=False, sort_keys=True))
    else:
        hg = "n/a" if r.homograph_accuracy is None else f"{r.homograph_accuracy:.4f}"
        print(f"sentences          {r.counts.sentences}")
        print(f"BLEU               {r.bleu:.4f}")
        print(f"PER                {r.per:.4f}")
        print(f"Ezafe P/R/F1       {r.ezafe_precision:.4f} / "
              f"{r.ezafe_recall:.4f} / {r.ezafe_f1:.4f}")
        print(f"homograph accuracy {hg}")
        print(f"alignment mismatches {r.counts.alignment_mismatches}")
    return 0


# -- inspect ---------------------------------------------------------------------------

def cmd_inspect(args) -> int:
    path = args.path
    with open(path, "rb") as fh:
        head = fh.read(16)
    if head.startswith(b"G2PM"):
        info = checkpoint_meta(path)
        summary = {"kind": "checkpoint", **info}
    elif head.startswith(b"g2p-bpe"):
        tok = tokmod.load_tokenizer(path)
        summary = {
            "kind": "tokenizer",
            "vocab": len(tok.vocab),
            "merges": len(tok.merges),
            "max_token_len": tok.max_token_len,
            "min_frequency": tok.min_frequency,
            "vocab_limit": tok.vocab_limit,
            "meta": tok.meta,
        }
    elif head.lstrip().startswith(b"{"):
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        first_line = text.splitlines()[0] if text else ""
        try:
            # a report is one JSON document; a corpus is JSON Lines
            doc = json.loads(text)
        except json.JSONDecodeError:
            doc = None
        if doc is not None and ("bleu" in doc or "counts" in doc):
            summary = {"kind": "report", **{
                k: doc[k] for k in ("meta", "bleu", "per") if k in doc
            }}
        else:
            try:
                header = json.loads(first_line)
            except json.JSONDecodeError:
                print(f"unrecognized artifact: {path}", file=sys.stderr)
                return 1
            corpus = corpusmod.load_corpus(path)
            summary = {"kind": "corpus", "entries": len(corpus),
                       "train": len(corpus.train), "val": len(corpus.val),
                       "test": len(corpus.test)}
            if "meta" in header and "id" not in header:
                summary["meta"] = header["meta"]
    else:
        print(f"unrecognized artifact: {path}", file=sys.stderr)
        return 1
    print(json.dumps(summary, ensure_ascii=False, indent=2, sort_keys=True))
    return 0


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="g2p-bridge",
        description="Persian grapheme-to-phoneme pipeline over a bijective "
                    "intermediate alphabet",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="run seed")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--alphabet", help="alphabet config file (default bundled)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", parents=[common],
                       help="normalize Persian text (stdin to stdout)")
    p.add_argument("--in", dest="infile")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("canonicalize", parents=[common],
                       help="rewrite conventional romanization to Pinglish")
    p.add_argument("--in", dest="infile")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("lexicon", parents=[common], help="lexicon utilities")
    actions = p.add_subparsers(dest="action", required=True)
    check = actions.add_parser("check", parents=[common],
                               help="validate readings against the alphabet")
    check.add_argument("--lexicon", required=True)
    check.set_defaults(func=cmd_lexicon)

    p = sub.add_parser("split", parents=[common],
                       help="assign train/val/test labels")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--val-n", type=int, default=1000)
    p.add_argument("--test-n", type=int, default=1000)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("augment", parents=[common],
                       help="grow the train split by merge/split operations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--target-size", type=int, required=True)
    p.add_argument("--max-words", type=int, default=8)
    p.add_argument("--merge-ratio", type=float, default=0.5)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train-tokenizer", parents=[common],
                       help="train the BPE tokenizer on interleaved fa/pg lines")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-limit", type=int, default=2372)
    p.add_argument("--min-frequency", type=int, default=100)
    p.add_argument("--max-token-len", type=int, default=3)
    p.set_defaults(func=cmd_train_tokenizer)

    p = sub.add_parser("train", parents=[common],
                       help="train the transducer on a labeled corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--encoder-layers", type=int)
    p.add_argument("--decoder-layers", type=int)
    p.add_argument("--heads", type=int)
    p.add_argument("--ffn-dim", type=int)
    p.add_argument("--hidden-size", type=int)
    p.add_argument("--pos-dim", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--max-seq-len", type=int)
    p.add_argument("--dtype", choices=("float32", "float64"))
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--label-smoothing", type=float)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("convert", parents=[common],
                       help="convert Persian text to Pinglish (stdin to stdout)")
    p.add_argument("--model", required=True)
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--beam", type=int, default=1)
    p.add_argument("--max-len", type=int)
    p.add_argument("--in", dest="infile")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("evaluate", parents=[common],
                       help="score a trained model on a corpus split")
    p.add_argument("--model", required=True)
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--split", default="test")
    p.add_argument("--beam", type=int, default=1)
    p.add_argument("--max-len", type=int)
    p.add_argument("--bleu-order", type=int, default=4)
    p.add_argument("--char-bleu", action="store_true")
    p.add_argument("--per-unit", choices=("char", "word"), default="char")
    p.add_argument("--per-ignore-spaces", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("inspect", parents=[common],
                       help="describe any artifact file")
    p.add_argument("--path", required=True)
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("G2P_BRIDGE_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except G2PBridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
