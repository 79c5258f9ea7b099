import pytest

from g2p_bridge.codec import default_alphabet
from g2p_bridge.corpus import CorpusEntry, HomographTag
from g2p_bridge.errors import NotAHomograph, ParseError
from g2p_bridge.homograph import (
    HomographLexicon,
    Reading,
    annotate_homographs,
    default_lexicon,
    disambiguate_rule_based,
    load_lexicon,
    parse_lexicon,
    save_lexicon,
    validate_lexicon,
)

LEXICON = default_lexicon()


def entry(fa, pg, ezafe=(), homographs=(), id="e1"):
    return CorpusEntry(id=id, fa=fa, pg=pg, ezafe=frozenset(ezafe),
                       homographs=tuple(homographs))


class TestDefaultLexicon:
    def test_loads_and_validates(self):
        assert validate_lexicon(LEXICON, default_alphabet()) == []

    def test_tiger_has_three_readings(self):
        readings = LEXICON.readings("ببر")
        assert len(readings) == 3
        assert {r.reading_id for r in readings} == {"tiger", "carry", "cut"}


class TestValidate:
    def test_single_reading_flagged(self):
        lex = HomographLexicon({"کلمه": (Reading("only", "kalame"),)})
        assert any("2 readings" in p for p in validate_lexicon(lex))

    def test_duplicate_reading_ids(self):
        lex = HomographLexicon({"کلمه": (
            Reading("a", "kal", prior_rank=1), Reading("a", "kel", prior_rank=2),
        )})
        assert any("duplicate" in p for p in validate_lexicon(lex))

    def test_bad_rank_permutation(self):
        lex = HomographLexicon({"کلمه": (
            Reading("a", "kal", prior_rank=1), Reading("b", "kel", prior_rank=3),
        )})
        assert any("permutation" in p for p in validate_lexicon(lex))

    def test_invalid_pg_characters(self):
        lex = HomographLexicon({"کلمه": (
            Reading("a", "xal", prior_rank=1), Reading("b", "kel", prior_rank=2),
        )})
        assert any("non-alphabet" in p for p in validate_lexicon(lex))


class TestAnnotate:
    def test_tiger_reading_matched(self):
        e = entry("ببر آمد", "babr Amad")
        annotated, reports = annotate_homographs(e, LEXICON)
        assert annotated.homographs == (HomographTag(0, "ببر", "tiger"),)
        assert reports == []

    def test_ezafe_suffix_stripped_before_match(self):
        e = entry("ببر وحشی آمد", "babre vahši Amad", ezafe={0})
        annotated, _ = annotate_homographs(e, LEXICON)
        assert annotated.homographs == (HomographTag(0, "ببر", "tiger"),)

    def test_no_lexicon_word(self):
        e = entry("کتاب آمد", "ketAb Amad")
        annotated, reports = annotate_homographs(e, LEXICON)
        assert annotated.homographs == ()
        assert reports == []

    def test_unmatched_pronunciation_reported(self):
        e = entry("ببر آمد", "bibor Amad")
        annotated, reports = annotate_homographs(e, LEXICON)
        assert annotated.homographs == (HomographTag(0, "ببر", "?"),)
        assert len(reports) == 1

    def test_idempotent(self):
        e = entry("گل زیبا است", "gole zibA ast", ezafe={0})
        once, _ = annotate_homographs(e, LEXICON)
        twice, _ = annotate_homographs(once, LEXICON)
        assert once == twice


class TestDisambiguate:
    def test_context_attribute_wins(self):
        words = ["جنگل", "ببر", "دید"]
        assert disambiguate_rule_based(words, 1, LEXICON) == "tiger"

    def test_other_context(self):
        words = ["قیچی", "ببر", "کاغذ"]
        assert disambiguate_rule_based(words, 1, LEXICON) == "cut"

    def test_no_overlap_falls_back_to_prior(self):
        words = ["سلام", "ببر", "چطوری"]
        assert disambiguate_rule_based(words, 1, LEXICON) == "tiger"

    def test_not_a_homograph(self):
        with pytest.raises(NotAHomograph):
            disambiguate_rule_based(["کتاب"], 0, LEXICON)

    def test_irrelevant_words_never_change_argmax(self):
        base = ["نامه", "مهر", "رسید"]
        chosen = disambiguate_rule_based(base, 1, LEXICON)
        assert chosen == "seal"
        for filler in ("چیز", "بسیار", "امروز"):
            noisy = [filler, base[0], "مهر", base[2], filler]
            assert disambiguate_rule_based(noisy, 2, LEXICON) == chosen

    def test_window_limits_context(self):
        # the cue word sits outside a window of 1, so the prior wins
        words = ["جنگل", "یک", "ببر"]
        assert disambiguate_rule_based(words, 2, LEXICON, window=1) == "tiger"
        words = ["امضا", "یک", "مهر"]
        assert disambiguate_rule_based(words, 2, LEXICON, window=1) == "affection"


class TestLexiconIO:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "lex.jsonl"
        save_lexicon(LEXICON, path)
        back = load_lexicon(path)
        assert back.entries == LEXICON.entries

    def test_parse_error_line(self):
        with pytest.raises(ParseError) as exc:
            parse_lexicon('{"surface": "a", "readings": []}\nbogus\n')
        assert exc.value.line == 2

    def test_duplicate_surface(self):
        line = '{"surface": "ببر", "readings": [{"reading_id": "x", "pg": "a"}]}'
        with pytest.raises(ParseError):
            parse_lexicon(line + "\n" + line)
