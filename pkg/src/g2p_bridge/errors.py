"""Exception types shared across the toolkit.

Every domain error raised by this package derives from :class:`G2PBridgeError`,
so callers (and the CLI) can separate domain failures from bugs.
"""

from __future__ import annotations


class G2PBridgeError(Exception):
    """Base class for all domain errors raised by this package."""


# -- codec ------------------------------------------------------------------

class CodecError(G2PBridgeError):
    pass


class UnknownCharacter(CodecError):
    """A character outside the alphabet image appeared in a Pinglish string."""

    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(f"unknown character {char!r} at position {position}")


class UnknownPhoneme(CodecError):
    def __init__(self, phoneme: str):
        self.phoneme = phoneme
        super().__init__(f"phoneme {phoneme!r} is not in the alphabet")


class UnmappableSubstring(CodecError):
    """Canonicalization hit input that no rewrite rule or alphabet entry covers."""

    def __init__(self, position: int, fragment: str):
        self.position = position
        self.fragment = fragment
        super().__init__(f"unmappable input {fragment!r} at position {position}")


class InvalidPhonemeSequence(CodecError):
    """Boundary markers are doubled, leading, or trailing."""


class InvalidAlphabet(CodecError):
    """An alphabet config file could not be parsed or failed validation."""


# -- corpus -----------------------------------------------------------------

class CorpusError(G2PBridgeError):
    pass


class ParseError(CorpusError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class InvariantViolation(CorpusError):
    def __init__(self, entry_id: str, reason: str):
        self.entry_id = entry_id
        self.reason = reason
        super().__init__(f"entry {entry_id!r}: {reason}")


class RegisterMismatch(CorpusError):
    pass


class InsufficientData(CorpusError):
    pass


class TargetUnreachable(CorpusError):
    """No legal merge or split operations remain below the augmentation target."""


# -- tokenizer --------------------------------------------------------------

class TokenizerError(G2PBridgeError):
    pass


class LengthMismatch(G2PBridgeError):
    """Paired lists have different lengths (interleave, corpus metrics)."""


class EmptyCorpus(TokenizerError):
    pass


class UnknownId(TokenizerError):
    def __init__(self, token_id: int):
        self.token_id = token_id
        super().__init__(f"token id {token_id} is outside the vocabulary")


class FormatVersionMismatch(G2PBridgeError):
    """A serialized artifact declares a version this build cannot read."""

    def __init__(self, found: str, expected: str):
        self.found = found
        self.expected = expected
        super().__init__(f"format version {found!r}, expected {expected!r}")


class CorruptFile(G2PBridgeError):
    pass


# -- homograph --------------------------------------------------------------

class LexiconError(G2PBridgeError):
    pass


class NotAHomograph(LexiconError):
    def __init__(self, word: str):
        self.word = word
        super().__init__(f"{word!r} is not in the homograph lexicon")


# -- model ------------------------------------------------------------------

class ModelError(G2PBridgeError):
    pass


class InvalidConfig(ModelError):
    pass


class SequenceTooLong(ModelError):
    def __init__(self, length: int, limit: int):
        self.length = length
        self.limit = limit
        super().__init__(f"sequence length {length} exceeds model limit {limit}")


class DivergedLoss(ModelError):
    """Training encountered a non-finite loss."""


class InvalidBeamWidth(ModelError):
    def __init__(self, width: int):
        self.width = width
        super().__init__(f"beam width must be >= 1, got {width}")


class ShapeMismatch(ModelError):
    pass


# -- metrics ----------------------------------------------------------------

class MetricsError(G2PBridgeError):
    pass


class EmptyHypothesisCorpus(MetricsError):
    pass


class EmptyReference(MetricsError):
    pass


class NoHomographOccurrences(MetricsError):
    pass
