"""Scoring OCR output: alignment, CER/WER, and the error taxonomy.

Aligns hypothesis text against a reference, classifies every substitution,
and aggregates a corpus report that separates raw errors from those that
survive encoding canonicalization.

Run: python3 demos/02_ocr_evaluation.py
"""

from pgforge import (
    align_chars,
    build_confusion,
    cer,
    classify_substitution,
    evaluate_corpus,
    wer,
)

reference = "ὁ λόγος ἦν πρὸς τὸν θεόν"
hypothesis = "ὁ λογος ἦν πρὀς τὸν θεόν"  # two diacritic slips

alignment = align_chars(reference, hypothesis)
print(f"edit distance: {alignment.cost}")
for op in alignment.ops:
    if op.kind != "match":
        print(f"  {op.kind}: {op.ref_char!r} -> {op.hyp_char!r}")
print(f"CER: {cer(reference, hypothesis):.4f}")
print(f"WER: {wer(reference, hypothesis):.4f}")
print()

# Each substitution lands in exactly one class, tested in a fixed order:
# encoding duplicate, diacritic slip, case, letter, punctuation/spacing.
pairs = [
    ("ά", "\u1f71"),  # same vowel, different accent encodings
    ("ἰ", "ἱ"),  # smooth vs rough breathing
    ("Δ", "Λ"),  # capital delta vs capital lambda
    ("σ", "δ"),  # sigma vs delta
    ("ς", ","),       # final sigma read as a comma
]
for ref_char, hyp_char in pairs:
    cls = classify_substitution(ref_char, hyp_char)
    print(f"  {ref_char!r} -> {hyp_char!r}: {cls.value}")
print()

# A confusion matrix over many aligned lines supports per-letter analysis
# and a diacritic share: the fraction of errors that are encoding or
# diacritic slips rather than wrong letters.
corpus = [
    ("άλλος", "\u1f71λλος"),
    ("ἰδεῖν", "ἱδεῖν"),
    ("σοφὸς", "δοφὸς"),
]
matrix = build_confusion([align_chars(r, h) for r, h in corpus])
print(f"total substitutions: {matrix.total_errors}")
print(f"diacritic share: {matrix.diacritic_share:.2f}")
print("by base letter:", {k: v for k, v in sorted(matrix.by_base_letter().items())})
print()

# Corpus-level scoring is micro-averaged. With normalize_first the report
# carries both readings: raw and after canonicalization.
report = evaluate_corpus(corpus, normalize_first=True)
print(f"raw CER:        {report.raw_cer:.4f}")
print(f"normalized CER: {report.cer:.4f}")
print("documents:", [(d.doc_id, round(d.cer, 4)) for d in report.per_document])
