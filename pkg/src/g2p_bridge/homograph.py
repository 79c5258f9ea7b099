"""Homograph (polyphone) lexicon: words spelled one way with several
pronunciations, the annotation of corpora against that lexicon, and a
rule-based context disambiguator for running without a trained model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .codec import IntermediateAlphabet, default_alphabet
from .corpus import CorpusEntry, HomographTag
from .errors import LexiconError, NotAHomograph, ParseError


@dataclass(frozen=True)
class Reading:
    """One pronunciation of a homograph and the context that signals it."""

    reading_id: str
    pg: str
    context_attributes: frozenset[str] = frozenset()
    prior_rank: int = 1


@dataclass(frozen=True)
class HomographLexicon:
    entries: dict[str, tuple[Reading, ...]]

    def __contains__(self, surface: str) -> bool:
        return surface in self.entries

    def readings(self, surface: str) -> tuple[Reading, ...]:
        return self.entries[surface]


def validate_lexicon(
    lexicon: HomographLexicon, alphabet: IntermediateAlphabet | None = None
) -> list[str]:
    """Check lexicon invariants; returns problem descriptions (empty = clean)."""
    alphabet = alphabet or default_alphabet()
    problems: list[str] = []
    for surface, readings in lexicon.entries.items():
        if len(readings) < 2:
            problems.append(f"{surface!r}: a homograph needs >= 2 readings")
        ids = [r.reading_id for r in readings]
        if len(set(ids)) != len(ids):
            problems.append(f"{surface!r}: duplicate reading ids")
        ranks = sorted(r.prior_rank for r in readings)
        if ranks != list(range(1, len(readings) + 1)):
            problems.append(
                f"{surface!r}: prior ranks {ranks} are not a permutation of "
                f"1..{len(readings)}"
            )
        for r in readings:
            bad = [c for c in r.pg if c not in alphabet.image]
            if bad:
                problems.append(
                    f"{surface!r}/{r.reading_id!r}: pg {r.pg!r} uses "
                    f"non-alphabet characters {bad}"
                )
    return problems


def load_lexicon(path) -> HomographLexicon:
    """Read a JSON Lines lexicon, one surface form per line."""
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh.read())


def parse_lexicon(text: str) -> HomographLexicon:
    entries: dict[str, tuple[Reading, ...]] = {}
    for line, raw in enumerate(text.splitlines(), start=1):
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        try:
            record = json.loads(raw)
            surface = record["surface"]
            readings = tuple(
                Reading(
                    reading_id=r["reading_id"],
                    pg=r["pg"],
                    context_attributes=frozenset(r.get("context_attributes", [])),
                    prior_rank=int(r.get("prior_rank", i + 1)),
                )
                for i, r in enumerate(record["readings"])
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(line, f"bad lexicon record: {exc}") from exc
        if surface in entries:
            raise ParseError(line, f"duplicate surface form {surface!r}")
        entries[surface] = readings
    return HomographLexicon(entries=entries)


def save_lexicon(lexicon: HomographLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for surface, readings in lexicon.entries.items():
            record = {
                "surface": surface,
                "readings": [
                    {
                        "reading_id": r.reading_id,
                        "pg": r.pg,
                        "context_attributes": sorted(r.context_attributes),
                        "prior_rank": r.prior_rank,
                    }
                    for r in readings
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def default_lexicon() -> HomographLexicon:
    """Small curated lexicon shipped for tests and demos."""
    text = (
        resources.files("g2p_bridge.data")
        .joinpath("lexicon_default.jsonl")
        .read_text(encoding="utf-8")
    )
    return parse_lexicon(text)


# -- corpus annotation ---------------------------------------------------------

def annotate_homographs(
    entry: CorpusEntry, lexicon: HomographLexicon
) -> tuple[CorpusEntry, list[str]]:
    """Tag every lexicon word in the entry with the reading its pg realizes.

    The Pinglish word at the same index is matched against the readings'
    pronunciations (Ezafe 'e' stripped when the index is Ezafe-marked); a
    pronunciation matching no reading is tagged "?" and reported. Idempotent:
    existing tags are recomputed, not appended to.
    """
    fa_words = entry.fa_words
    pg_words = entry.words
    reports: list[str] = []
    tags: list[HomographTag] = []
    for i, word in enumerate(fa_words):
        if word not in lexicon:
            continue
        if i >= len(pg_words):
            reports.append(
                f"{entry.id}: word {i} ({word!r}) has no aligned pg word"
            )
            continue
        pg_word = pg_words[i]
        base = pg_word[:-1] if i in entry.ezafe and pg_word.endswith("e") else pg_word
        match = None
        for reading in lexicon.readings(word):
            if reading.pg in (pg_word, base):
                match = reading.reading_id
                break
        if match is None:
            reports.append(
                f"{entry.id}: word {i} ({word!r}) pronunciation {pg_word!r} "
                "matches no reading"
            )
            match = "?"
        tags.append(HomographTag(i, word, match))
    annotated = CorpusEntry(
        id=entry.id,
        fa=entry.fa,
        pg=entry.pg,
        ezafe=entry.ezafe,
        homographs=tuple(tags),
        register=entry.register,
    )
    return annotated, reports


def disambiguate_rule_based(
    words: list[str],
    index: int,
    lexicon: HomographLexicon,
    window: int = 5,
) -> str:
    """Pick a reading for words[index] from surrounding context.

    Each reading scores the overlap between its context attributes and the
    words within ``window`` positions on either side; the highest score wins
    and ties fall back to prior_rank (1 = most frequent).
    """
    word = words[index]
    if word not in lexicon:
        raise NotAHomograph(word)
    lo = max(0, index - window)
    context = set(words[lo:index]) | set(words[index + 1:index + 1 + window])
    best = min(
        lexicon.readings(word),
        key=lambda r: (-len(r.context_attributes & context), r.prior_rank),
    )
    return best.reading_id


__all__ = [
    "Reading",
    "HomographLexicon",
    "LexiconError",
    "validate_lexicon",
    "load_lexicon",
    "parse_lexicon",
    "save_lexicon",
    "default_lexicon",
    "annotate_homographs",
    "disambiguate_rule_based",
]
