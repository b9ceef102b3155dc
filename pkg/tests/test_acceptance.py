"""Acceptance suite: one test per release criterion, at pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion.

Model-level benchmark numbers for this material (OCR engine CER/WER and
detection mAP on the original scanned test set) are out of reach here by
design: they would require the page images and trained recognition models,
which are not part of this library. Criterion 8 states this explicitly and
substitutes oracle equivalence, property suites, and a throughput floor.
"""

from __future__ import annotations

import functools
import itertools
import random
import time

from pgforge.cleanup import clean_lines, dehyphenate, drop_empty_lines, filter_latin
from pgforge.greek import canonicalize, intuitive_form
from pgforge.layout import (
    Page,
    Polygon,
    RegionClass,
    TextLine,
    TextRegion,
    filter_relevant,
    parse_page_xml,
)
from pgforge.layout_eval import (
    Detection,
    average_precision_50,
    match_detections,
    reading_order_score,
)
from pgforge.ocr_eval import align_chars, build_confusion, evaluate_corpus
from pgforge.vert import (
    Lexicon,
    annotate,
    corpus_stats,
    parse_vert,
    validate_vert,
    vert_string,
)
from pgforge.vert import VertDocument, VertLine, VertPage
from dataclasses import replace


def criterion(number: int, description: str):
    """Print one PASS/FAIL line per criterion when the test completes."""

    def decorator(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number} FAIL: {description}")
                raise
            print(f"ACCEPTANCE {number} PASS: {description}")
            return result

        return wrapper

    return decorator


# ---------------------------------------------------------------- criterion 1

# 25 base letters plus 5 precomposed polytonic forms: 30 symbols.
ALPHABET_30 = "αβγδεζηθικλμνξοπρστυφχψως" + "ά\u1f71ἀᾁᾶ"


def brute_force_levenshtein(a: str, b: str) -> int:
    """Naive recurrence, memoized; no backtrace, no affix trimming."""
    memo: dict[tuple[int, int], int] = {}

    def dist(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        if (i, j) not in memo:
            memo[(i, j)] = min(
                dist(i - 1, j) + 1,
                dist(i, j - 1) + 1,
                dist(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
            )
        return memo[(i, j)]

    return dist(len(a), len(b))


@criterion(1, "alignment cost equals the brute-force oracle on 1000 pairs in <10s")
def test_criterion_1_edit_distance_oracle():
    assert len(ALPHABET_30) == 30
    rng = random.Random(9001)
    pairs = [
        (
            "".join(rng.choice(ALPHABET_30) for _ in range(rng.randrange(13))),
            "".join(rng.choice(ALPHABET_30) for _ in range(rng.randrange(13))),
        )
        for _ in range(1000)
    ]
    start = time.perf_counter()
    for ref, hyp in pairs:
        assert align_chars(ref, hyp).cost == brute_force_levenshtein(ref, hyp)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"oracle suite took {elapsed:.2f}s"


# ---------------------------------------------------------------- criterion 2

SEVEN_PAIRS = [
    ("ί", "\u1f77"),
    ("ά", "\u1f71"),
    ("έ", "\u1f73"),
    ("ό", "\u1f79"),
    ("ύ", "\u1f7b"),
    ("ή", "\u1f75"),
    ("ώ", "\u1f7d"),
]


@criterion(2, "the seven duplicate pairs merge; duplicate-only corpus has normalized CER 0")
def test_criterion_2_duplicate_pair_canonicalization():
    for tonos, oxia in SEVEN_PAIRS:
        assert canonicalize(tonos) == canonicalize(oxia)

    # corpus whose only divergences are tonos/oxia encodings
    to_oxia = {tonos: oxia for tonos, oxia in SEVEN_PAIRS}
    words = ["λόγος", "καί", "θεός", "ἀρχή", "πρός", "αὐτός", "ζωή"]
    rng = random.Random(9002)
    pairs = []
    for _ in range(20):
        ref = " ".join(rng.choice(words) for _ in range(rng.randrange(3, 9)))
        ref = canonicalize(ref)
        hyp = "".join(to_oxia.get(ch, ch) for ch in ref)
        pairs.append((ref, hyp))
    assert any(ref != hyp for ref, hyp in pairs)
    report = evaluate_corpus(pairs, normalize_first=True)
    assert report.raw_cer > 0.0
    assert report.cer == 0.0
    assert report.wer == 0.0


# ---------------------------------------------------------------- criterion 3


@criterion(3, "81 diacritic-class substitutions out of 100 give share 0.81 exactly")
def test_criterion_3_error_taxonomy_share():
    cases = (
        [("ά", "\u1f71")] * 50      # encoding duplicates
        + [("ἰ", "ἱ")] * 31    # smooth vs rough breathing
        + [("σ", "δ")] * 12    # letter confusion
        + [("ς", ",")] * 7          # final sigma vs punctuation
    )
    assert len(cases) == 100
    alignments = [align_chars(f"μ{r}μ", f"μ{h}μ") for r, h in cases]
    assert all(len(a.substitutions()) == 1 for a in alignments)
    matrix = build_confusion(alignments)
    assert matrix.total_errors == 100
    assert matrix.diacritic_share == 81 / 100
    assert matrix.diacritic_share == 0.81


# ---------------------------------------------------------------- criterion 4


def _square(x0: float, y0: float, side: float) -> Polygon:
    return Polygon(((x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)))


def brute_force_order_score(gt: list[str], pred: list[str]) -> float:
    pos = {x: i for i, x in enumerate(pred)}
    n = len(gt)
    good = total = 0
    for i in range(n):
        for j in range(i + 1, n):
            total += 1
            if pos[gt[i]] < pos[gt[j]]:
                good += 1
    return good / total if total else 1.0


@criterion(4, "detection P/R, AP, and reading-order scores match hand computations")
def test_criterion_4_detection_metrics():
    greek = RegionClass.MAIN_TEXT_COL_GREEK

    def region(rid, poly):
        return TextRegion(id=rid, region_class=greek, polygon=poly)

    gt = [region("a", _square(0, 0, 10)), region("b", _square(20, 0, 10))]
    preds = [
        Detection(greek, _square(0, 0, 10)),
        Detection(greek, _square(20, 1, 10)),  # IoU 9/11 against "b"
        Detection(greek, _square(50, 50, 10)),
    ]
    stats = match_detections(gt, preds, iou_threshold=0.5).per_class[greek]
    assert abs(stats.precision - 2 / 3) <= 1e-9
    assert stats.recall == 1.0

    single_gt = [region("a", _square(0, 0, 10))]
    scored = [
        Detection(greek, _square(0, 0, 10), score=0.9),
        Detection(greek, _square(50, 50, 10), score=0.95),
    ]
    assert average_precision_50(single_gt, scored)[greek] == 0.5

    assert reading_order_score(list("abcd"), list("abdc")) == 5 / 6
    for n in range(2, 7):
        ids = [f"l{i}" for i in range(n)]
        for perm in itertools.permutations(ids):
            assert reading_order_score(ids, list(perm)) == brute_force_order_score(
                ids, list(perm)
            )


# ---------------------------------------------------------------- criterion 5


@criterion(5, "relevance filter keeps exactly the Greek column and title; no Latin tokens")
def test_criterion_5_relevance_filtering(eight_classes_xml, lexicon_tsv, tmp_path):
    page = parse_page_xml(eight_classes_xml)
    assert len(page.regions) == 8
    kept = filter_relevant(page)
    assert {r.region_class for r in kept.regions} == {
        RegionClass.MAIN_TEXT_COL_GREEK,
        RegionClass.MAIN_TEXT_TITLE,
    }
    assert len(kept.regions) == 2

    import shutil
    from pgforge.cli import main

    pages_dir = tmp_path / "pages"
    pages_dir.mkdir()
    shutil.copy(eight_classes_xml, pages_dir / "p1.xml")
    out = tmp_path / "doc.vert"
    assert main(
        ["build-vert", "--pages", str(pages_dir), "--lexicon", str(lexicon_tsv),
         "--doc-id", "PG003", "--out", str(out)]
    ) == 0
    doc = parse_vert(out.read_text(encoding="utf-8"))
    wordforms = [t.wordform for p in doc.pages for l in p.lines for t in l.tokens]
    assert wordforms, "pipeline produced no tokens"
    from pgforge.greek import is_latin_letter

    latin_tokens = [
        w for w in wordforms
        if any(c.isalpha() for c in w)
        and all(is_latin_letter(c) for c in w if c.isalpha())
    ]
    assert latin_tokens == []


# ---------------------------------------------------------------- criterion 6

VERT_WORDS = ["λόγος", "Λόγος", "θεός", "ἀρχή", "καί", "οὗτος", "ἦν", "λ\u1f79γος", "."]
VERT_LEXICON = Lexicon(
    [
        ("λόγος", "λόγος", "N"),
        ("Λόγος", "λόγος", "N"),
        ("θεός", "θεός", "N"),
        ("καί", "καί", "CONJ"),
    ]
)


def random_vert_document(rng: random.Random, doc_id: str) -> VertDocument:
    pages = []
    word_seq = 0
    for p in range(rng.randrange(1, 4)):
        page_ref = f"page_{p:04d}.png"
        lines = []
        for l in range(rng.randrange(0, 4)):
            line_id = f"p{p}_l{l}"
            tokens = []
            for _ in range(rng.randrange(0, 5)):
                word_seq += 1
                token = annotate(rng.choice(VERT_WORDS), VERT_LEXICON)
                tokens.append(
                    replace(
                        token,
                        word_id=f"w{word_seq}",
                        line_id=line_id,
                        page_ref=page_ref,
                        doc_id=doc_id,
                    )
                )
            lines.append(VertLine(line_id=line_id, tokens=tuple(tokens)))
        pages.append(VertPage(page_ref=page_ref, lines=tuple(lines)))
    return VertDocument(doc_id=doc_id, pages=tuple(pages))


@criterion(6, "vert round-trip, wire-level layer validation, and additive stats")
def test_criterion_6_vert_integrity():
    rng = random.Random(9006)
    docs = [random_vert_document(rng, f"doc{i}") for i in range(100)]
    for doc in docs:
        text = vert_string(doc)
        assert parse_vert(text) == doc
        assert validate_vert(text) == []
    separate = [corpus_stats([d]).total for d in docs]
    combined = corpus_stats(docs)
    assert combined.total == sum(separate)
    assert combined.per_doc == list(zip([d.doc_id for d in docs], separate))


# ---------------------------------------------------------------- criterion 7


def _random_polytonic_text(rng: random.Random, max_len: int = 40) -> str:
    pool = (
        "αβγδεοςυ ά\u1f71ἀᾁᾶ\u1f77ί"
        "ΛΘΩ.,\u0387\u037e-abcdef ’"
    )
    return "".join(rng.choice(pool) for _ in range(rng.randrange(max_len)))


def _random_line_block(rng: random.Random) -> list[str]:
    lines = []
    for _ in range(rng.randrange(0, 8)):
        roll = rng.random()
        if roll < 0.15:
            lines.append(rng.choice(["", "  "]))
        else:
            lines.append(_random_polytonic_text(rng))
    return lines


def _random_page(rng: random.Random) -> Page:
    regions = []
    classes = list(RegionClass)
    for i in range(rng.randrange(0, 6)):
        cls = rng.choice(classes)
        x0, y0 = rng.uniform(0, 500), rng.uniform(0, 500)
        regions.append(
            TextRegion(
                id=f"r{i}",
                region_class=cls,
                polygon=_square(x0, y0, rng.uniform(1, 100)),
                lines=(TextLine(id=f"r{i}l0", text="x", reading_index=0),),
                reading_index=i,
            )
        )
    return Page("p.png", 600, 600, tuple(regions))


@criterion(7, "all cleanup and normalization operations are idempotent on 500 random inputs")
def test_criterion_7_idempotence_suite():
    rng = random.Random(9007)
    for _ in range(500):
        text = _random_polytonic_text(rng)
        once = canonicalize(text)
        assert canonicalize(once) == once
        intuitive = intuitive_form(text)
        assert intuitive_form(intuitive) == intuitive

    for _ in range(500):
        lines = _random_line_block(rng)
        for op in (dehyphenate, drop_empty_lines, filter_latin, clean_lines):
            once = op(lines)
            assert op(once) == once

    for _ in range(500):
        page = _random_page(rng)
        once = filter_relevant(page)
        assert filter_relevant(once) == once


# ---------------------------------------------------------------- criterion 8

CONFUSION_POOL = [
    ("ά", "\u1f71"),
    ("ί", "\u1f77"),
    ("ἰ", "ἱ"),
    ("σ", "δ"),
    ("ς", "."),
    ("ο", "σ"),
]


def _synthetic_ocr_corpus(rng: random.Random, n_lines: int, line_len: int):
    """Reference lines with sparse, realistic recognition errors."""
    letters = "αβγδεζηθικλμνξοπρστυφχψω"
    accented = "άέήίόύώἀἰᾶ"
    pairs = []
    subs = {r: h for r, h in CONFUSION_POOL}
    for _ in range(n_lines):
        chars = []
        for k in range(line_len):
            if k % 7 == 6:
                chars.append(" ")
            elif rng.random() < 0.2:
                chars.append(rng.choice(accented))
            else:
                chars.append(rng.choice(letters))
        ref = "".join(chars)
        roll = rng.random()
        n_errors = 0 if roll < 0.5 else (1 if roll < 0.85 else 2)
        hyp = list(ref)
        for _ in range(n_errors):
            pos = rng.randrange(len(hyp))
            kind = rng.random()
            if kind < 0.7:
                original = hyp[pos]
                hyp[pos] = subs.get(original, rng.choice(letters))
            elif kind < 0.85:
                del hyp[pos]
            else:
                hyp.insert(pos, rng.choice(letters))
        pairs.append((ref, "".join(hyp)))
    return pairs


@criterion(8, "model benchmarks are out of scope by design; 1M chars evaluate in <10s")
def test_criterion_8_throughput_floor():
    print(
        "\nNOTE: recognition-model and detection-model benchmark scores for the "
        "original scanned test set are not reproducible in this library: they "
        "require page images and trained models that are not shipped. The "
        "machinery is verified by the oracle and property suites instead."
    )
    rng = random.Random(9008)
    line_len = 64
    n_lines = 16000
    pairs = _synthetic_ocr_corpus(rng, n_lines, line_len)
    total_ref = sum(len(ref) for ref, _ in pairs)
    assert total_ref >= 1_000_000, f"corpus too small: {total_ref}"

    start = time.perf_counter()
    report = evaluate_corpus(pairs)
    elapsed = time.perf_counter() - start
    assert report.n_ref_chars == total_ref
    assert report.cer > 0.0
    assert elapsed < 10.0, f"evaluate_corpus took {elapsed:.2f}s for {total_ref} chars"
    print(f"throughput: {total_ref} reference chars in {elapsed:.2f}s")
