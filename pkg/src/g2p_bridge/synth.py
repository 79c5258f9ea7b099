"""Deterministic synthetic Persian/Pinglish corpus generator.

Real deployments ingest corpora through :func:`g2p_bridge.corpus.load_corpus`
(or any record iterable); this module provides the bundled stand-in corpus
for tests, demos, and end-to-end runs. Sentences are template-built from a
small aligned vocabulary, with Ezafe constructions and lexicon-consistent
homograph occurrences mixed in.
"""

from __future__ import annotations

import random

from .corpus import CorpusEntry, HomographTag, ParallelCorpus

# (fa, pg) pairs; one Pinglish word per Persian word keeps entries aligned.
NOUNS = [
    ("کتاب", "ketAb"), ("شب", "šab"), ("روز", "rUz"), ("مرد", "mard"),
    ("زن", "zan"), ("شهر", "šahr"), ("باغ", "bAġ"), ("دوست", "dUst"),
    ("نان", "nAn"), ("سیب", "sib"), ("دل", "del"), ("کار", "kAr"),
    ("راه", "rAh"), ("در", "dar"),
]
ADJECTIVES = [
    ("خوب", "ķUb"), ("بزرگ", "bozorg"), ("کوچک", "kUčak"), ("زیبا", "zibA"),
    ("سخت", "saķt"), ("تازه", "tAze"), ("سرد", "sard"), ("گرم", "garm"),
]
VERBS = [
    ("است", "ast"), ("بود", "bUd"), ("آمد", "Amad"), ("رفت", "raft"),
    ("دید", "did"), ("دارد", "dArad"),
]
PRONOUNS = [("من", "man"), ("تو", "to"), ("او", "U"), ("ما", "mA")]

INFORMAL_SUBJECTS = [("کتابا", "ketAbA"), ("اونجا", "UnjA"), ("دوستم", "dUstam")]
INFORMAL_PREDICATES = [("خوبه", "ķUbe"), ("سرده", "sarde"), ("گرمه", "garme")]

# Homographs mirror data/lexicon_default.jsonl: surface, reading id, pg, and
# the Persian context words (with transliterations) that signal the reading.
HOMOGRAPHS = [
    ("ببر", "tiger", "babr", [("جنگل", "jangal"), ("حیوان", "heyvAn"), ("وحشی", "vahši")]),
    ("ببر", "carry", "bebar", [("کیف", "kif"), ("بار", "bAr")]),
    ("ببر", "cut", "bobor", [("کاغذ", "kAġaz"), ("مو", "mU")]),
    ("گل", "flower", "gol", [("باغ", "bAġ"), ("زیبا", "zibA"), ("بو", "bU")]),
    ("گل", "mud", "gel", [("باران", "bArAn"), ("کوچه", "kUče"), ("کثیف", "kasif")]),
    ("مهر", "affection", "mehr", [("مادر", "mAdar"), ("عشق", "ešġ"), ("دل", "del")]),
    ("مهر", "seal", "mohr", [("نامه", "nAme"), ("امضا", "emzA"), ("سند", "sanad")]),
]


def _ezafe_np(rng: random.Random):
    """[noun-e adj verb] with the Ezafe vowel on the head noun."""
    noun = rng.choice(NOUNS)
    adj = rng.choice(ADJECTIVES)
    verb = rng.choice(VERBS)
    fa = [noun[0], adj[0], verb[0]]
    pg = [noun[1] + "e", adj[1], verb[1]]
    return fa, pg, {0}, []


def _possessive(rng: random.Random):
    noun = rng.choice(NOUNS)
    pron = rng.choice(PRONOUNS)
    verb = rng.choice(VERBS)
    fa = [noun[0], pron[0], verb[0]]
    pg = [noun[1] + "e", pron[1], verb[1]]
    return fa, pg, {0}, []


def _plain(rng: random.Random):
    pron = rng.choice(PRONOUNS)
    noun = rng.choice(NOUNS)
    verb = rng.choice(VERBS)
    fa = [pron[0], noun[0], verb[0]]
    pg = [pron[1], noun[1], verb[1]]
    return fa, pg, set(), []


def _homograph_ezafe(rng: random.Random):
    """Homograph heads an Ezafe phrase whose modifier cues the reading."""
    surface, reading_id, pg_word, contexts = rng.choice(HOMOGRAPHS)
    ctx = rng.choice(contexts)
    verb = rng.choice(VERBS)
    fa = [surface, ctx[0], verb[0]]
    pg = [pg_word + "e", ctx[1], verb[1]]
    return fa, pg, {0}, [HomographTag(0, surface, reading_id)]


def _homograph_context(rng: random.Random):
    """Context word first, homograph second, no Ezafe."""
    surface, reading_id, pg_word, contexts = rng.choice(HOMOGRAPHS)
    ctx = rng.choice(contexts)
    verb = rng.choice(VERBS)
    fa = [ctx[0], surface, verb[0]]
    pg = [ctx[1], pg_word, verb[1]]
    return fa, pg, set(), [HomographTag(1, surface, reading_id)]


def _informal(rng: random.Random):
    subj = rng.choice(INFORMAL_SUBJECTS)
    pred = rng.choice(INFORMAL_PREDICATES)
    fa = [subj[0], pred[0]]
    pg = [subj[1], pred[1]]
    return fa, pg, set(), []


_FORMAL_TEMPLATES = [_ezafe_np, _possessive, _plain, _homograph_ezafe,
                     _homograph_context]


def synthetic_corpus(
    n_entries: int,
    seed: int,
    informal_rate: float = 0.2,
    id_prefix: str = "toy",
) -> ParallelCorpus:
    """Generate an aligned, annotated corpus of ``n_entries`` sentences."""
    rng = random.Random(seed)
    entries: list[CorpusEntry] = []
    for k in range(n_entries):
        if rng.random() < informal_rate:
            fa, pg, ezafe, tags = _informal(rng)
            register = "informal"
        else:
            template = rng.choice(_FORMAL_TEMPLATES)
            fa, pg, ezafe, tags = template(rng)
            register = "formal"
        entries.append(CorpusEntry(
            id=f"{id_prefix}-{k:04d}",
            fa=" ".join(fa),
            pg=" ".join(pg),
            ezafe=frozenset(ezafe),
            homographs=tuple(tags),
            register=register,
        ))
    return ParallelCorpus(entries=entries)
