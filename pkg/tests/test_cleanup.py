"""Tests for the OCR text cleanup pipeline."""

from __future__ import annotations

import json
import random

import pytest

from pgforge.cleanup import (
    ProvenanceLog,
    clean_lines,
    clean_pairs,
    dehyphenate,
    drop_empty_lines,
    filter_latin,
)

GREEK_WORDS = ["θεολογία", "καί", "λόγος", "ἀρχῇ", "θεόν", "οὗτος", "πρὸς", "ἦν"]
LATIN_WORDS = ["sancti", "patris", "verbum", "est", "apud", "deum"]


def random_lines(rng: random.Random, max_lines: int = 8) -> list[str]:
    lines = []
    for _ in range(rng.randrange(max_lines + 1)):
        roll = rng.random()
        if roll < 0.15:
            lines.append(rng.choice(["", "   ", "\t"]))
            continue
        words = []
        for _ in range(rng.randrange(1, 6)):
            pool = LATIN_WORDS if rng.random() < 0.3 else GREEK_WORDS
            word = rng.choice(pool)
            if rng.random() < 0.15:
                word += rng.choice([".", ",", "\u0387"])
            words.append(word)
        line = " ".join(words)
        if rng.random() < 0.25:
            line += "-"
        lines.append(line)
    return lines


class TestDehyphenate:
    def test_basic_merge(self):
        assert dehyphenate(["θεολο-", "γία καί"]) == ["θεολογία", "καί"]

    def test_no_hyphen_unchanged(self):
        assert dehyphenate(["abc", "def"]) == ["abc", "def"]

    def test_hyphen_final_last_line_flagged(self):
        log = ProvenanceLog()
        assert dehyphenate(["abc-"], log=log) == ["abc-"]
        assert any(e["action"] == "flag_hyphen_final_last_line" for e in log.entries)

    def test_consumed_line_removed(self):
        assert dehyphenate(["θεολο-", "γία"]) == ["θεολογία"]

    def test_word_split_across_three_lines(self):
        assert dehyphenate(["θε-", "ολο-", "γία καί"]) == ["θεολογία", "καί"]

    def test_merge_recorded_with_line_ids(self):
        log = ProvenanceLog()
        dehyphenate(["θεολο-", "γία"], ids=["l1", "l2"], log=log)
        merges = [e for e in log.entries if e["action"] == "merge"]
        assert merges == [
            {
                "op": "dehyphenate",
                "action": "merge",
                "line_id": "l1",
                "next_line_id": "l2",
                "moved_token": "γία",
            }
        ]

    def test_unicode_hyphen_variants(self):
        assert dehyphenate(["θεολο\u2010", "γία"]) == ["θεολογία"]

    def test_letters_preserved(self):
        rng = random.Random(401)
        hyphen_chars = {"-", "\u00ad", "\u2010", "\u2011"}
        for _ in range(300):
            lines = random_lines(rng)
            merged = dehyphenate(lines)

            def letters(ls):
                return "".join(c for l in ls for c in l if c.isalpha() and c not in hyphen_chars)

            assert letters(lines) == letters(merged)

    def test_idempotent(self):
        rng = random.Random(402)
        for _ in range(300):
            lines = random_lines(rng)
            once = dehyphenate(lines)
            assert dehyphenate(once) == once


class TestDropEmptyLines:
    def test_basic(self):
        assert drop_empty_lines(["α", "", "β"]) == ["α", "β"]

    def test_all_empty(self):
        assert drop_empty_lines(["", "  ", "\t"]) == []

    def test_no_empties_identity(self):
        assert drop_empty_lines(["α", "β"]) == ["α", "β"]

    def test_idempotent(self):
        rng = random.Random(403)
        for _ in range(200):
            lines = random_lines(rng)
            once = drop_empty_lines(lines)
            assert drop_empty_lines(once) == once


class TestFilterLatin:
    def test_pure_latin_line_dropped(self):
        assert filter_latin(["Sancti Patris"]) == []

    def test_latin_token_removed(self):
        assert filter_latin(["ὁ λόγος est μέγας"]) == ["ὁ λόγος μέγας"]

    def test_pure_greek_unchanged(self):
        assert filter_latin(["ὁ λόγος."]) == ["ὁ λόγος."]

    def test_mixed_script_token_kept_and_flagged(self):
        log = ProvenanceLog()
        assert filter_latin(["τὸ σίγμαsigma"], log=log) == ["τὸ σίγμαsigma"]
        assert any(e["action"] == "flag_mixed_script_token" for e in log.entries)

    def test_latin_token_with_punctuation_removed(self):
        assert filter_latin(["ὁ λόγος est."]) == ["ὁ λόγος"]

    def test_threshold_behaviour(self):
        # 6 latin letters vs 6 greek letters: exactly 0.5, not above
        line = "abcdef ὁλόγος"
        assert filter_latin([line], line_threshold=0.5) == ["ὁλόγος"]
        assert filter_latin([line], line_threshold=0.4) == []

    def test_bad_threshold(self):
        with pytest.raises(ValueError):
            filter_latin(["x"], line_threshold=1.5)

    def test_greek_letters_survive_token_filtering(self):
        rng = random.Random(404)
        for _ in range(300):
            lines = random_lines(rng)
            kept = filter_latin(lines, line_threshold=1.0)  # no line drops
            def greek_letters(ls):
                from pgforge.greek import is_greek_letter
                return "".join(c for l in ls for c in l if is_greek_letter(c))
            assert greek_letters(lines) == greek_letters(kept)

    def test_drops_are_logged_never_silent(self):
        log = ProvenanceLog()
        filter_latin(["Sancti Patris", "ὁ λόγος est"], ids=["a", "b"], log=log)
        actions = {(e["action"], e["line_id"]) for e in log.entries}
        assert ("drop_line", "a") in actions
        assert ("drop_token", "b") in actions

    def test_idempotent(self):
        rng = random.Random(405)
        for _ in range(300):
            lines = random_lines(rng)
            once = filter_latin(lines)
            assert filter_latin(once) == once


class TestComposedPipeline:
    def test_fixed_order_example(self):
        lines = ["", "θεολο-", "γία est", "Sanctus Pater", "καί"]
        assert clean_lines(lines) == ["θεολογία", "καί"]

    def test_idempotent(self):
        rng = random.Random(406)
        for _ in range(500):
            lines = random_lines(rng)
            once = clean_lines(lines)
            assert clean_lines(once) == once

    def test_latin_drop_exposing_hyphen_still_converges(self):
        # dropping the latin token leaves the line hyphen-final; the
        # pipeline must finish the merge rather than return unstable output
        out = clean_lines(["ωδε- est", "καί"])
        assert out == clean_lines(out)
        assert out == ["ωδεκαί"]

    def test_provenance_round_trips_to_json(self, tmp_path):
        log = ProvenanceLog()
        clean_lines(["θεολο-", "γία est", ""], ids=["l1", "l2", "l3"], log=log)
        path = tmp_path / "prov.json"
        log.save(path)
        entries = json.loads(path.read_text(encoding="utf-8"))
        assert {e["op"] for e in entries} >= {"dehyphenate", "filter_latin", "drop_empty_lines"}

    def test_flags_not_duplicated_across_passes(self):
        log = ProvenanceLog()
        clean_lines(["ὁ λόγος-"], log=log)
        flags = [e for e in log.entries if e["action"] == "flag_hyphen_final_last_line"]
        assert len(flags) == 1

    def test_pairs_interface_keeps_surviving_ids(self):
        pairs = [("l1", "θεολο-"), ("l2", "γία"), ("l3", ""), ("l4", "verbum est")]
        cleaned = clean_pairs(pairs)
        assert cleaned == [("l1", "θεολογία")]
