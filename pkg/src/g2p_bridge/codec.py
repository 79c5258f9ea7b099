"""Intermediate phonemic alphabet: validation, canonicalization, and the
bijective conversion between Pinglish strings and phoneme sequences.

The alphabet maps every Persian phoneme to exactly one Latin-script character
(Pinglish). Because the mapping is injective and single-codepoint, a Pinglish
string and its phoneme sequence are interconvertible without loss, which is
what the rest of the toolkit builds on.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources

from .errors import (
    InvalidAlphabet,
    InvalidPhonemeSequence,
    UnknownCharacter,
    UnknownPhoneme,
    UnmappableSubstring,
)

#: Characters that must never appear as alphabet targets. 'x' has no Persian
#: phoneme; c/q/u/w invite ambiguous dual readings.
EXCLUDED_CHARS = frozenset("cuqwx")

#: Token used inside a PhonemeSequence to mark a word boundary.
WORD_BOUNDARY = "<wb>"


@dataclass(frozen=True)
class IntermediateAlphabet:
    """The phoneme-to-character table plus romanization rewrite rules.

    ``phoneme_to_char`` maps symbolic phoneme names to single characters.
    ``digraph_rules`` rewrites conventional romanizations ("kh", "aa", ...)
    into canonical alphabet characters; rule order breaks ties between
    equal-length sources.
    """

    phoneme_to_char: dict[str, str]
    digraph_rules: tuple[tuple[str, str], ...] = ()
    separator: str = " "

    @functools.cached_property
    def char_to_phoneme(self) -> dict[str, str]:
        return {c: p for p, c in self.phoneme_to_char.items()}

    @functools.cached_property
    def image(self) -> frozenset[str]:
        """The set of characters the alphabet maps onto."""
        return frozenset(self.phoneme_to_char.values())

    @functools.cached_property
    def _rules_by_length(self) -> tuple[tuple[str, str], ...]:
        # Longest source first; original order is the tiebreak.
        return tuple(
            sorted(self.digraph_rules, key=lambda r: -len(r[0]))
        )


@dataclass(frozen=True)
class PhonemeSequence:
    """A sequence of phoneme names interleaved with word-boundary markers."""

    items: tuple[str, ...]

    def __post_init__(self):
        prev_boundary = True  # forbids a leading marker
        for tok in self.items:
            if tok == WORD_BOUNDARY:
                if prev_boundary:
                    raise InvalidPhonemeSequence(
                        "leading or doubled word-boundary marker"
                    )
                prev_boundary = True
            else:
                prev_boundary = False
        if self.items and self.items[-1] == WORD_BOUNDARY:
            raise InvalidPhonemeSequence("trailing word-boundary marker")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


@dataclass(frozen=True)
class Violation:
    """One alphabet-invariant failure, naming the offending entry."""

    code: str
    entry: str
    message: str


@dataclass(frozen=True)
class AlphabetValidation:
    ok: bool
    violations: tuple[Violation, ...] = field(default=())


def validate_alphabet(table: IntermediateAlphabet) -> AlphabetValidation:
    """Check every alphabet invariant and return the complete violation list.

    Violation codes: ExcludedCharacterUsed, DuplicateTargetCharacter,
    MultiCodepointTarget, UnknownDigraphTarget, SeparatorCollision.
    """
    violations: list[Violation] = []
    seen: dict[str, str] = {}
    for phoneme, char in table.phoneme_to_char.items():
        if len(char) != 1:
            violations.append(Violation(
                "MultiCodepointTarget", phoneme,
                f"{phoneme!r} maps to {char!r} ({len(char)} code points)",
            ))
        if any(c in EXCLUDED_CHARS for c in char):
            violations.append(Violation(
                "ExcludedCharacterUsed", phoneme,
                f"{phoneme!r} maps to excluded character {char!r}",
            ))
        if char in seen:
            violations.append(Violation(
                "DuplicateTargetCharacter", phoneme,
                f"{phoneme!r} and {seen[char]!r} both map to {char!r}",
            ))
        else:
            seen[char] = phoneme
        if char == table.separator:
            violations.append(Violation(
                "SeparatorCollision", phoneme,
                f"{phoneme!r} maps to the separator character",
            ))
    image = set(table.phoneme_to_char.values())
    for source, target in table.digraph_rules:
        if target not in image:
            violations.append(Violation(
                "UnknownDigraphTarget", source,
                f"rule {source!r} -> {target!r} targets a character "
                "outside the alphabet image",
            ))
    return AlphabetValidation(ok=not violations, violations=tuple(violations))


# -- Persian text normalization ----------------------------------------------

# Arabic presentation variants mapped onto Persian canonical forms, plus
# Arabic-Indic digits unified to the Persian (extended) digit block.
_PERSIAN_CANONICAL = {
    "ك": "ک",  # kaf
    "ي": "ی",  # yeh
    "ى": "ی",  # alef maksura -> yeh
    "ة": "ه",  # teh marbuta -> heh
    "أ": "ا",  # alef with hamza above -> alef
    "إ": "ا",  # alef with hamza below -> alef
}
_PERSIAN_CANONICAL.update({
    chr(0x0660 + d): chr(0x06F0 + d) for d in range(10)
})
_NORMALIZE_TABLE = str.maketrans(_PERSIAN_CANONICAL)


def normalize_persian(text: str) -> str:
    """Canonicalize Persian text: Arabic variant letters and digits unified,
    whitespace runs collapsed to single spaces, ends stripped.

    Total and idempotent; characters without a canonical variant pass
    through, and the zero-width non-joiner is preserved.
    """
    text = text.translate(_NORMALIZE_TABLE)
    return " ".join(text.split())


# -- romanization canonicalization -------------------------------------------

def canonicalize(raw: str, table: IntermediateAlphabet) -> str:
    """Rewrite a conventional romanization into canonical Pinglish.

    Scans left to right; at each position the longest matching digraph rule
    wins, otherwise the character must already be in the alphabet image (or
    whitespace, which collapses to a single separator). Idempotent by
    construction because rule targets are image characters and no output
    ever recreates a rule source.
    """
    words: list[str] = []
    current: list[str] = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch.isspace():
            if current:
                words.append("".join(current))
                current = []
            i += 1
            continue
        for source, target in table._rules_by_length:
            if raw.startswith(source, i):
                current.append(target)
                i += len(source)
                break
        else:
            if ch in table.image:
                current.append(ch)
                i += 1
            else:
                raise UnmappableSubstring(i, ch)
    if current:
        words.append("".join(current))
    return table.separator.join(words)


# -- bijective conversion -----------------------------------------------------

def to_phonemes(s: str, table: IntermediateAlphabet) -> PhonemeSequence:
    """Convert a canonical Pinglish string to its phoneme sequence.

    One phoneme per character; separators become word-boundary markers.
    Raises UnknownCharacter for anything outside the alphabet image and
    InvalidPhonemeSequence for leading/trailing/doubled separators.
    """
    items: list[str] = []
    lookup = table.char_to_phoneme
    for i, ch in enumerate(s):
        if ch == table.separator:
            items.append(WORD_BOUNDARY)
        elif ch in lookup:
            items.append(lookup[ch])
        else:
            raise UnknownCharacter(i, ch)
    return PhonemeSequence(tuple(items))


def from_phonemes(p: PhonemeSequence, table: IntermediateAlphabet) -> str:
    """Inverse of :func:`to_phonemes`; exact roundtrip on valid input."""
    out: list[str] = []
    for tok in p:
        if tok == WORD_BOUNDARY:
            out.append(table.separator)
        else:
            char = table.phoneme_to_char.get(tok)
            if char is None:
                raise UnknownPhoneme(tok)
            out.append(char)
    return "".join(out)


# -- alphabet config file I/O -------------------------------------------------

def parse_alphabet(text: str) -> IntermediateAlphabet:
    """Parse the alphabet config format.

    One ``phoneme_name<TAB>character`` line per entry, ``#`` comments, and a
    ``[digraphs]`` section of ``source<TAB>target`` rewrite rules.
    """
    phoneme_to_char: dict[str, str] = {}
    rules: list[tuple[str, str]] = []
    in_digraphs = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped == "[digraphs]":
            in_digraphs = True
            continue
        if "\t" not in line:
            raise InvalidAlphabet(f"line {lineno}: expected TAB-separated pair")
        left, _, right = line.partition("\t")
        left, right = left.strip(), right.strip()
        if not left or not right:
            raise InvalidAlphabet(f"line {lineno}: empty field")
        if in_digraphs:
            rules.append((left, right))
        else:
            if left in phoneme_to_char:
                raise InvalidAlphabet(f"line {lineno}: duplicate phoneme {left!r}")
            phoneme_to_char[left] = right
    return IntermediateAlphabet(
        phoneme_to_char=phoneme_to_char, digraph_rules=tuple(rules)
    )


def load_alphabet(path) -> IntermediateAlphabet:
    with open(path, encoding="utf-8") as fh:
        return parse_alphabet(fh.read())


def format_alphabet(table: IntermediateAlphabet) -> str:
    lines = [f"{p}\t{c}" for p, c in table.phoneme_to_char.items()]
    if table.digraph_rules:
        lines.append("[digraphs]")
        lines.extend(f"{s}\t{t}" for s, t in table.digraph_rules)
    return "\n".join(lines) + "\n"


@functools.lru_cache(maxsize=1)
def default_alphabet() -> IntermediateAlphabet:
    """The shipped 29-phoneme table (23 consonants, 6 vowels).

    Loaded from ``data/alphabet_default.tsv`` so deployments can override it;
    the validator enforces the structural constraints either way. Note the
    close back vowel is written 'U' (lowercase u is excluded) and kept
    distinct from 'o'.
    """
    text = (
        resources.files("g2p_bridge.data")
        .joinpath("alphabet_default.tsv")
        .read_text(encoding="utf-8")
    )
    return parse_alphabet(text)
