"""Parallel corpus data model, JSON Lines I/O, deterministic splitting, and
the merge/split augmentation that grows the training set without touching
Ezafe-bound word pairs.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple

from .codec import IntermediateAlphabet, default_alphabet
from .errors import (
    InsufficientData,
    InvariantViolation,
    ParseError,
    RegisterMismatch,
    TargetUnreachable,
)

REGISTERS = ("formal", "informal")


class HomographTag(NamedTuple):
    word_index: int
    surface: str
    reading_id: str


@dataclass(frozen=True)
class CorpusEntry:
    """One aligned Persian/Pinglish sentence pair.

    ``ezafe`` holds 0-based indices (over the Pinglish word segmentation) of
    words carrying the Ezafe linking vowel; ``homographs`` tags ambiguous
    words with the reading realized in ``pg``.
    """

    id: str
    fa: str
    pg: str
    ezafe: frozenset[int] = frozenset()
    homographs: tuple[HomographTag, ...] = ()
    register: str = "formal"

    @property
    def words(self) -> list[str]:
        return self.pg.split(" ")

    @property
    def fa_words(self) -> list[str]:
        return self.fa.split(" ")


def validate_entry(
    entry: CorpusEntry, alphabet: IntermediateAlphabet | None = None
) -> list[str]:
    """Return the list of invariant violations for one entry (empty = clean)."""
    alphabet = alphabet or default_alphabet()
    problems: list[str] = []
    words = entry.words
    n = len(words)
    if entry.register not in REGISTERS:
        problems.append(f"unknown register {entry.register!r}")
    if not entry.pg or any(not w for w in words):
        problems.append("pg is empty or has doubled/leading/trailing separators")
    allowed = alphabet.image
    for ch in entry.pg:
        if ch != alphabet.separator and ch not in allowed:
            problems.append(f"pg contains non-alphabet character {ch!r}")
            break
    for idx in entry.ezafe:
        if not 0 <= idx < n:
            problems.append(f"ezafe index {idx} out of range (word count {n})")
        elif idx == n - 1:
            problems.append(f"ezafe index {idx} marks the last word")
    for tag in entry.homographs:
        if not 0 <= tag.word_index < n:
            problems.append(
                f"homograph index {tag.word_index} out of range (word count {n})"
            )
    return problems


@dataclass
class ParallelCorpus:
    """An ordered collection of entries plus optional train/val/test labels."""

    entries: list[CorpusEntry] = field(default_factory=list)
    split_labels: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def subset(self, label: str) -> list[CorpusEntry]:
        return [e for e in self.entries if self.split_labels.get(e.id) == label]

    @property
    def train(self) -> list[CorpusEntry]:
        return self.subset("train")

    @property
    def val(self) -> list[CorpusEntry]:
        return self.subset("val")

    @property
    def test(self) -> list[CorpusEntry]:
        return self.subset("test")


# -- JSON Lines I/O -----------------------------------------------------------

def _entry_from_record(record: dict, line: int) -> tuple[CorpusEntry, str | None]:
    try:
        entry = CorpusEntry(
            id=str(record["id"]),
            fa=record["fa"],
            pg=record["pg"],
            ezafe=frozenset(int(i) for i in record.get("ezafe", [])),
            homographs=tuple(
                HomographTag(int(h[0]), h[1], h[2])
                for h in record.get("homographs", [])
            ),
            register=record.get("register", "formal"),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(line, f"bad record: {exc}") from exc
    if not isinstance(entry.fa, str) or not isinstance(entry.pg, str):
        raise ParseError(line, "fa and pg must be strings")
    return entry, record.get("split")


def _build_corpus(
    numbered_records: Iterable[tuple[int, dict]],
    alphabet: IntermediateAlphabet | None,
) -> ParallelCorpus:
    corpus = ParallelCorpus()
    seen: set[str] = set()
    for line, record in numbered_records:
        entry, split = _entry_from_record(record, line)
        if entry.id in seen:
            raise InvariantViolation(entry.id, "duplicate id")
        seen.add(entry.id)
        problems = validate_entry(entry, alphabet)
        if problems:
            raise InvariantViolation(entry.id, "; ".join(problems))
        corpus.entries.append(entry)
        if split is not None:
            corpus.split_labels[entry.id] = split
    if corpus.split_labels and len(corpus.split_labels) != len(corpus.entries):
        raise InvariantViolation(
            "<corpus>", "split labels must cover all entries or none"
        )
    return corpus


def corpus_from_records(
    records: Iterable[dict], alphabet: IntermediateAlphabet | None = None
) -> ParallelCorpus:
    """Build a validated corpus from any iterable of record dicts.

    This is the ingestion surface: anything that yields records with keys
    id/fa/pg (and optionally ezafe/homographs/register/split) can feed the
    pipeline, files being just one source.
    """
    return _build_corpus(enumerate(records, start=1), alphabet)


def load_corpus(path, alphabet: IntermediateAlphabet | None = None) -> ParallelCorpus:
    """Read a JSON Lines corpus, checking every entry invariant.

    A leading ``{"meta": ...}`` line (written by the CLI for provenance) is
    skipped. Failures report the true 1-based file line number.
    """
    numbered: list[tuple[int, dict]] = []
    with open(path, encoding="utf-8") as fh:
        for line, text in enumerate(fh, start=1):
            text = text.strip()
            if not text:
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(line, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ParseError(line, "record is not a JSON object")
            if "meta" in record and "id" not in record:
                continue
            numbered.append((line, record))
    return _build_corpus(numbered, alphabet)


def save_corpus(corpus: ParallelCorpus, path, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if meta is not None:
            fh.write(json.dumps({"meta": meta}, ensure_ascii=False) + "\n")
        for entry in corpus.entries:
            record = {
                "id": entry.id,
                "fa": entry.fa,
                "pg": entry.pg,
                "ezafe": sorted(entry.ezafe),
                "homographs": [list(t) for t in entry.homographs],
                "register": entry.register,
            }
            if entry.id in corpus.split_labels:
                record["split"] = corpus.split_labels[entry.id]
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


# -- splitting into train/val/test --------------------------------------------

def split_corpus(
    corpus: ParallelCorpus, val_n: int, test_n: int, seed: int
) -> ParallelCorpus:
    """Assign deterministic train/val/test labels, leaving entries in order."""
    if val_n < 0 or test_n < 0:
        raise InsufficientData("val_n and test_n must be non-negative")
    if val_n + test_n >= len(corpus.entries):
        raise InsufficientData(
            f"need val_n + test_n < corpus size, got {val_n}+{test_n} "
            f"with {len(corpus.entries)} entries"
        )
    ids = [e.id for e in corpus.entries]
    rng = random.Random(seed)
    shuffled = ids[:]
    rng.shuffle(shuffled)
    labels: dict[str, str] = {}
    for i, entry_id in enumerate(shuffled):
        if i < val_n:
            labels[entry_id] = "val"
        elif i < val_n + test_n:
            labels[entry_id] = "test"
        else:
            labels[entry_id] = "train"
    return ParallelCorpus(entries=list(corpus.entries), split_labels=labels)


# -- merge / split augmentation ------------------------------------------------

def merge_entries(a: CorpusEntry, b: CorpusEntry) -> CorpusEntry:
    """Concatenate two same-register entries, shifting b's word indices."""
    if a.register != b.register:
        raise RegisterMismatch(
            f"cannot merge {a.register!r} entry {a.id!r} with "
            f"{b.register!r} entry {b.id!r}"
        )
    shift = len(a.words)
    return CorpusEntry(
        id=f"{a.id}+{b.id}",
        fa=f"{a.fa} {b.fa}",
        pg=f"{a.pg} {b.pg}",
        ezafe=a.ezafe | frozenset(i + shift for i in b.ezafe),
        homographs=a.homographs
        + tuple(t._replace(word_index=t.word_index + shift) for t in b.homographs),
        register=a.register,
    )


def legal_split_points(entry: CorpusEntry) -> list[int]:
    """Boundaries (i, i+1) where a cut is allowed: i is not Ezafe-marked."""
    n = len(entry.words)
    return [i for i in range(n - 1) if i not in entry.ezafe]


def split_at_non_ezafe(entry: CorpusEntry, max_words: int) -> list[CorpusEntry]:
    """Cut an entry into fragments at non-Ezafe word boundaries.

    Greedy left-to-right: each fragment extends to ``max_words`` words, then
    cuts at the first legal boundary at or after that point, so a fragment
    only exceeds ``max_words`` when every in-range boundary is Ezafe-locked.
    Joining the fragments with single separators reproduces the entry
    exactly. With no legal split point, the entry comes back unchanged.
    """
    if max_words < 1:
        raise ValueError("max_words must be >= 1")
    words = entry.words
    fa_words = entry.fa_words
    n = len(words)
    legal = set(legal_split_points(entry))

    spans: list[tuple[int, int]] = []
    start = 0
    while start < n:
        if n - start <= max_words:
            spans.append((start, n - 1))
            break
        cut = None
        for i in range(start + max_words - 1, n - 1):
            if i in legal:
                cut = i
                break
        if cut is None:
            spans.append((start, n - 1))
            break
        spans.append((start, cut))
        start = cut + 1

    if len(spans) == 1:
        return [entry]

    fragments: list[CorpusEntry] = []
    fa_ok = len(fa_words) == n
    for k, (lo, hi) in enumerate(spans):
        fragments.append(CorpusEntry(
            id=f"{entry.id}:{k}",
            fa=" ".join(fa_words[lo:hi + 1]) if fa_ok else entry.fa,
            pg=" ".join(words[lo:hi + 1]),
            ezafe=frozenset(i - lo for i in entry.ezafe if lo <= i <= hi),
            homographs=tuple(
                t._replace(word_index=t.word_index - lo)
                for t in entry.homographs
                if lo <= t.word_index <= hi
            ),
            register=entry.register,
        ))
    return fragments


def augment(
    corpus: ParallelCorpus,
    target_size: int,
    seed: int,
    max_words: int = 8,
    merge_ratio: float = 0.5,
) -> ParallelCorpus:
    """Grow the train split to ``target_size`` entries by randomized merging
    and Ezafe-respecting splitting; val/test are untouched.

    ``merge_ratio`` sets the seeded merge/split mix (default 50/50); when the
    drawn operation has no legal move the other is tried. Derived entries
    join the pool and can be merged or split again. Deterministic for a
    fixed seed.
    """
    if not 0.0 <= merge_ratio <= 1.0:
        raise ValueError("merge_ratio must be in [0, 1]")
    train = corpus.train if corpus.split_labels else list(corpus.entries)
    if target_size < len(train):
        raise InsufficientData(
            f"target_size {target_size} is below the current train size {len(train)}"
        )
    rng = random.Random(seed)
    pool: list[CorpusEntry] = list(train)
    used_ids = {e.id for e in corpus.entries}

    def unique_id(base: str) -> str:
        candidate = base
        k = 2
        while candidate in used_ids:
            candidate = f"{base}~{k}"
            k += 1
        used_ids.add(candidate)
        return candidate

    def try_merge() -> list[CorpusEntry]:
        by_register: dict[str, list[int]] = {}
        for i, e in enumerate(pool):
            by_register.setdefault(e.register, []).append(i)
        eligible = [ixs for ixs in by_register.values() if len(ixs) >= 2]
        if not eligible:
            return []
        ixs = eligible[rng.randrange(len(eligible))]
        i, j = rng.sample(ixs, 2)
        merged = merge_entries(pool[i], pool[j])
        return [replace(merged, id=unique_id(merged.id))]

    def try_split() -> list[CorpusEntry]:
        splittable = [i for i, e in enumerate(pool) if legal_split_points(e)]
        if not splittable:
            return []
        entry = pool[splittable[rng.randrange(len(splittable))]]
        fragments = split_at_non_ezafe(entry, max_words)
        if len(fragments) == 1:
            # Legal points exist but the greedy pass kept one span; force a
            # cut at the first legal boundary instead.
            point = legal_split_points(entry)[0]
            fragments = _cut_at(entry, point)
        return [replace(f, id=unique_id(f.id)) for f in fragments]

    while len(pool) < target_size:
        merge_first = rng.random() < merge_ratio
        ops = [try_merge, try_split] if merge_first else [try_split, try_merge]
        produced = ops[0]()
        if not produced:
            produced = ops[1]()
        if not produced:
            raise TargetUnreachable(
                f"no legal merge or split operations remain at size {len(pool)} "
                f"(target {target_size})"
            )
        room = target_size - len(pool)
        pool.extend(produced[:room])

    if corpus.split_labels:
        labels = dict(corpus.split_labels)
        entries = list(corpus.entries)
        for e in pool[len(train):]:
            entries.append(e)
            labels[e.id] = "train"
        return ParallelCorpus(entries=entries, split_labels=labels)
    return ParallelCorpus(entries=list(pool), split_labels={})


def _cut_at(entry: CorpusEntry, point: int) -> list[CorpusEntry]:
    """Split an entry into exactly two fragments after word ``point``."""
    words = entry.words
    fa_words = entry.fa_words
    fa_ok = len(fa_words) == len(words)
    pieces = []
    for k, (lo, hi) in enumerate([(0, point), (point + 1, len(words) - 1)]):
        pieces.append(CorpusEntry(
            id=f"{entry.id}:{k}",
            fa=" ".join(fa_words[lo:hi + 1]) if fa_ok else entry.fa,
            pg=" ".join(words[lo:hi + 1]),
            ezafe=frozenset(i - lo for i in entry.ezafe if lo <= i <= hi),
            homographs=tuple(
                t._replace(word_index=t.word_index - lo)
                for t in entry.homographs
                if lo <= t.word_index <= hi
            ),
            register=entry.register,
        ))
    return pieces
