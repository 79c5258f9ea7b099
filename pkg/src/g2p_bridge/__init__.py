"""Persian grapheme-to-phoneme toolkit built around a bijective
single-character intermediate alphabet (Pinglish).

Subsystems: :mod:`~g2p_bridge.codec` (alphabet + conversions),
:mod:`~g2p_bridge.corpus` (data model, splitting, augmentation),
:mod:`~g2p_bridge.tokenizer` (length-capped BPE),
:mod:`~g2p_bridge.homograph` (polyphone lexicon),
:mod:`~g2p_bridge.model` (numpy encoder-decoder transducer),
:mod:`~g2p_bridge.metrics` (BLEU, PER, Ezafe, homograph accuracy),
:mod:`~g2p_bridge.cli` (pipeline commands).
"""

from . import codec, corpus, errors, homograph, metrics, model, synth, tokenizer
from .codec import (
    IntermediateAlphabet,
    PhonemeSequence,
    canonicalize,
    default_alphabet,
    from_phonemes,
    normalize_persian,
    to_phonemes,
    validate_alphabet,
)
from .corpus import CorpusEntry, ParallelCorpus, augment, load_corpus, split_corpus
from .metrics import EvalReport, bleu_corpus, evaluate, per
from .model import ModelConfig, TrainConfig, TransducerModel, build_model
from .tokenizer import BpeTokenizer, train_bpe

__version__ = "0.1.0"

__all__ = [
    "codec",
    "corpus",
    "errors",
    "homograph",
    "metrics",
    "model",
    "synth",
    "tokenizer",
    "IntermediateAlphabet",
    "PhonemeSequence",
    "canonicalize",
    "default_alphabet",
    "from_phonemes",
    "normalize_persian",
    "to_phonemes",
    "validate_alphabet",
    "CorpusEntry",
    "ParallelCorpus",
    "augment",
    "load_corpus",
    "split_corpus",
    "BpeTokenizer",
    "train_bpe",
    "EvalReport",
    "bleu_corpus",
    "evaluate",
    "per",
    "ModelConfig",
    "TrainConfig",
    "TransducerModel",
    "build_model",
    "__version__",
]
