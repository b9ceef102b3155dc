"""OCR output evaluation: alignment, CER/WER, and the error taxonomy.

Alignment is unit-cost Levenshtein with a full backtrace so that every
substitution pair feeds the confusion statistics. Error classes separate
encoding duplicates and diacritic slips (the bulk of polytonic OCR
errors) from real letter, case, and punctuation confusions.
"""

from __future__ import annotations

import csv
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .greek import CanonicalizationTable, base_letter, canonicalize


class EmptyReference(ValueError):
    """Raised when an error rate is requested against an empty reference."""


class EmptyCorpus(ValueError):
    """Raised when a corpus evaluation has nothing to measure."""


@dataclass(frozen=True)
class EditOp:
    kind: str  # match | substitute | insert | delete
    ref_char: str | None = None
    hyp_char: str | None = None


@dataclass(frozen=True)
class Alignment:
    """Minimal-cost edit script between a reference and a hypothesis."""

    ops: tuple[EditOp, ...]

    @property
    def cost(self) -> int:
        return sum(op.kind != "match" for op in self.ops)

    def reference(self) -> list:
        return [op.ref_char for op in self.ops if op.kind in ("match", "substitute", "delete")]

    def hypothesis(self) -> list:
        return [op.hyp_char for op in self.ops if op.kind in ("match", "substitute", "insert")]

    def substitutions(self) -> list[tuple[str, str]]:
        return [(op.ref_char, op.hyp_char) for op in self.ops if op.kind == "substitute"]


_NUMPY_CELL_THRESHOLD = 4096


def _dp_matrix_python(a: Sequence[int], b: Sequence[int]) -> list[list[int]]:
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    d[0] = list(range(m + 1))
    for i in range(1, n + 1):
        row = d[i]
        prev = d[i - 1]
        row[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            row[j] = min(
                prev[j - 1] + (ai != b[j - 1]),
                prev[j] + 1,
                row[j - 1] + 1,
            )
    return d


def _dp_matrix_numpy(a: Sequence[int], b: Sequence[int]) -> np.ndarray:
    # Row sweep; the left-to-right insertion chain is folded in with a
    # running minimum over (value - column index).
    n, m = len(a), len(b)
    av = np.asarray(a, dtype=np.int64)
    bv = np.asarray(b, dtype=np.int64)
    d = np.empty((n + 1, m + 1), dtype=np.int32)
    d[0] = np.arange(m + 1, dtype=np.int32)
    cols = np.arange(m + 1, dtype=np.int32)
    for i in range(1, n + 1):
        prev = d[i - 1]
        t = np.minimum(prev[:-1] + (av[i - 1] != bv), prev[1:] + 1)
        e = np.minimum.accumulate(np.concatenate(([np.int32(i)], t - cols[1:])))
        d[i] = e + cols
    return d


def _align_encoded(a: Sequence[int], b: Sequence[int]) -> list[tuple[str, int, int]]:
    """Backtraced edit script over encoded symbols.

    Returns (kind, ref_index, hyp_index) triples; -1 marks the absent side.
    Backtrace ties prefer substitute over delete over insert.
    """
    n, m = len(a), len(b)
    if (n + 1) * (m + 1) > _NUMPY_CELL_THRESHOLD:
        d = _dp_matrix_numpy(a, b)
    else:
        d = _dp_matrix_python(a, b)
    ops: list[tuple[str, int, int]] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = d[i][j]
        if i > 0 and j > 0:
            diag = d[i - 1][j - 1]
            if a[i - 1] == b[j - 1] and diag == here:
                ops.append(("match", i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
            if diag + 1 == here:
                ops.append(("substitute", i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
        if i > 0 and d[i - 1][j] + 1 == here:
            ops.append(("delete", i - 1, -1))
            i -= 1
            continue
        ops.append(("insert", -1, j - 1))
        j -= 1
    ops.reverse()
    return ops


def align_sequences(ref: Sequence, hyp: Sequence) -> Alignment:
    """Minimal-cost alignment of two symbol sequences (characters or tokens).

    Common prefixes and suffixes are matched greedily first, then the
    middle is solved by dynamic programming. Deterministic: backtrace ties
    prefer substitute over delete over insert.
    """
    n, m = len(ref), len(hyp)
    pre = 0
    while pre < n and pre < m and ref[pre] == hyp[pre]:
        pre += 1
    suf = 0
    while suf < n - pre and suf < m - pre and ref[n - 1 - suf] == hyp[m - 1 - suf]:
        suf += 1

    mid_ref = ref[pre : n - suf]
    mid_hyp = hyp[pre : m - suf]
    symbols: dict = {}
    enc_ref = [symbols.setdefault(s, len(symbols)) for s in mid_ref]
    enc_hyp = [symbols.setdefault(s, len(symbols)) for s in mid_hyp]

    ops: list[EditOp] = [EditOp("match", ref[k], hyp[k]) for k in range(pre)]
    for kind, ri, hi in _align_encoded(enc_ref, enc_hyp):
        ops.append(
            EditOp(
                kind,
                mid_ref[ri] if ri >= 0 else None,
                mid_hyp[hi] if hi >= 0 else None,
            )
        )
    for k in range(suf, 0, -1):
        ops.append(EditOp("match", ref[n - k], hyp[m - k]))
    return Alignment(tuple(ops))


def align_chars(ref: str, hyp: str) -> Alignment:
    """Character-level alignment; symbols are codepoints as given."""
    return align_sequences(ref, hyp)


def edit_distance(ref: Sequence, hyp: Sequence) -> int:
    return align_sequences(ref, hyp).cost


def cer(ref: str, hyp: str) -> float:
    """Character error rate: edit distance over reference length in codepoints."""
    if not ref:
        raise EmptyReference("reference text is empty")
    return edit_distance(ref, hyp) / len(ref)


def wer(ref: str, hyp: str) -> float:
    """Word error rate over whitespace tokens; punctuation stays attached."""
    ref_tokens = ref.split()
    if not ref_tokens:
        raise EmptyReference("reference text has no tokens")
    return edit_distance(ref_tokens, hyp.split()) / len(ref_tokens)


class ErrorClass(Enum):
    """Substitution taxonomy, tested in declaration order."""

    ENCODING_DUPLICATE = "EncodingDuplicate"
    DIACRITIC_VARIATION = "DiacriticVariation"
    CASE_CONFUSION = "CaseConfusion"
    LETTER_CONFUSION = "LetterConfusion"
    PUNCTUATION_OR_SPACING = "PunctuationOrSpacing"


def _is_letter(ch: str) -> bool:
    return len(ch) == 1 and unicodedata.category(ch).startswith("L")


def classify_substitution(
    ref_char: str, hyp_char: str, table: CanonicalizationTable | None = None
) -> ErrorClass:
    """Assign one substitution pair to its error class.

    Order of tests: equal after canonicalization; same base letter and case
    with different marks; same base letter across case; two distinct
    letters; anything involving a non-letter.
    """
    if canonicalize(ref_char, table) == canonicalize(hyp_char, table):
        return ErrorClass.ENCODING_DUPLICATE
    if _is_letter(ref_char) and _is_letter(hyp_char):
        # judge base and case on the decomposed base codepoint so that
        # titlecase precomposed letters count as uppercase
        ref_nfd = unicodedata.normalize("NFD", ref_char)[0]
        hyp_nfd = unicodedata.normalize("NFD", hyp_char)[0]
        ref_base, hyp_base = ref_nfd.lower(), hyp_nfd.lower()
        if ref_base == hyp_base and ref_nfd.isupper() == hyp_nfd.isupper():
            return ErrorClass.DIACRITIC_VARIATION
        if ref_base == hyp_base or ref_base.upper() == hyp_base.upper():
            return ErrorClass.CASE_CONFUSION
        return ErrorClass.LETTER_CONFUSION
    return ErrorClass.PUNCTUATION_OR_SPACING


# Classes that trace back to diacritic encoding rather than letter identity.
DIACRITIC_CLASSES = (ErrorClass.ENCODING_DUPLICATE, ErrorClass.DIACRITIC_VARIATION)


@dataclass
class ConfusionMatrix:
    """Substitution statistics: per-pair counts and per-class totals."""

    counts: dict[tuple[str, str], int] = field(default_factory=dict)
    classes: dict[tuple[str, str], ErrorClass] = field(default_factory=dict)
    class_totals: dict[ErrorClass, int] = field(default_factory=dict)
    total_errors: int = 0

    def add(self, ref_char: str, hyp_char: str, n: int = 1,
            table: CanonicalizationTable | None = None) -> None:
        pair = (ref_char, hyp_char)
        self.counts[pair] = self.counts.get(pair, 0) + n
        cls = self.classes.get(pair)
        if cls is None:
            cls = classify_substitution(ref_char, hyp_char, table)
            self.classes[pair] = cls
        self.class_totals[cls] = self.class_totals.get(cls, 0) + n
        self.total_errors += n

    @property
    def diacritic_share(self) -> float:
        """Fraction of substitutions that are encoding or diacritic slips."""
        if self.total_errors == 0:
            return 0.0
        hits = sum(self.class_totals.get(c, 0) for c in DIACRITIC_CLASSES)
        return hits / self.total_errors

    def top_patterns(self, k: int = 20, base: str | None = None) -> list[tuple[str, str, int]]:
        """Most frequent substitution pairs, optionally restricted to one base letter."""
        items = self.counts.items()
        if base is not None:
            items = [(p, n) for p, n in items if _safe_base(p[0]) == base]
        ranked = sorted(items, key=lambda item: (-item[1], item[0]))
        return [(r, h, n) for (r, h), n in ranked[:k]]

    def by_base_letter(self) -> dict[str, int]:
        """Substitution counts grouped by the reference character's base letter."""
        grouped: dict[str, int] = {}
        for (ref_char, _), n in self.counts.items():
            key = _safe_base(ref_char)
            grouped[key] = grouped.get(key, 0) + n
        return grouped

    def to_json_dict(self) -> dict:
        return {
            "total_errors": self.total_errors,
            "class_totals": {c.value: n for c, n in sorted(self.class_totals.items(), key=lambda i: i[0].value)},
            "diacritic_share": self.diacritic_share,
            "patterns": [
                {
                    "ref": f"{ord(r):04X}",
                    "hyp": f"{ord(h):04X}",
                    "count": n,
                    "error_class": self.classes[(r, h)].value,
                }
                for r, h, n in self.top_patterns(k=len(self.counts))
            ],
        }


def _safe_base(ch: str) -> str:
    return base_letter(ch) if _is_letter(ch) else ch


def build_confusion(
    alignments: Iterable[Alignment], table: CanonicalizationTable | None = None
) -> ConfusionMatrix:
    """Aggregate substitution pairs from alignments into one matrix."""
    matrix = ConfusionMatrix()
    for alignment in alignments:
        for ref_char, hyp_char in alignment.substitutions():
            matrix.add(ref_char, hyp_char, table=table)
    return matrix


def write_confusion_csv(matrix: ConfusionMatrix, path: str | Path) -> None:
    """CSV dump: ref_char_hex, hyp_char_hex, count, error_class."""
    rows = sorted(matrix.counts.items(), key=lambda item: (-item[1], item[0]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["ref_char_hex", "hyp_char_hex", "count", "error_class"])
        for (ref_char, hyp_char), n in rows:
            writer.writerow(
                [
                    f"{ord(ref_char):04X}",
                    f"{ord(hyp_char):04X}",
                    n,
                    matrix.classes[(ref_char, hyp_char)].value,
                ]
            )


@dataclass
class DocumentScore:
    doc_id: str
    n_ref_chars: int
    n_ref_words: int
    char_errors: int
    word_errors: int

    @property
    def cer(self) -> float | None:
        return self.char_errors / self.n_ref_chars if self.n_ref_chars else None

    @property
    def wer(self) -> float | None:
        return self.word_errors / self.n_ref_words if self.n_ref_words else None


@dataclass
class EvalReport:
    """Corpus-level scores, micro-averaged over concatenated counts.

    ``cer``/``wer`` are the headline numbers for the mode the evaluation ran
    in (``normalized`` says which); the raw-mode numbers are always kept so
    both readings are available side by side. The confusion matrix is built
    from the raw alignment, where encoding duplicates are still visible.
    """

    cer: float
    wer: float
    n_ref_chars: int
    n_ref_words: int
    confusion: ConfusionMatrix
    per_document: list[DocumentScore]
    normalized: bool
    raw_cer: float
    raw_wer: float

    def to_json_dict(self) -> dict:
        return {
            "cer": self.cer,
            "wer": self.wer,
            "n_ref_chars": self.n_ref_chars,
            "n_ref_words": self.n_ref_words,
            "normalized": self.normalized,
            "raw_cer": self.raw_cer,
            "raw_wer": self.raw_wer,
            "per_document": [
                {
                    "doc_id": d.doc_id,
                    "cer": d.cer,
                    "wer": d.wer,
                    "n_ref_chars": d.n_ref_chars,
                    "n_ref_words": d.n_ref_words,
                }
                for d in self.per_document
            ],
            "confusion": self.confusion.to_json_dict(),
        }


def score_pair(ref: str, hyp: str) -> tuple[int, int, list[tuple[str, str]]]:
    """Char distance, token distance, and substitution pairs for one document."""
    alignment = align_chars(ref, hyp)
    word_dist = edit_distance(ref.split(), hyp.split())
    return alignment.cost, word_dist, alignment.substitutions()


def evaluate_corpus(
    pairs: Sequence[tuple[str, str]],
    normalize_first: bool = False,
    table: CanonicalizationTable | None = None,
    doc_ids: Sequence[str] | None = None,
    scores: Sequence[tuple[int, int, list[tuple[str, str]]]] | None = None,
) -> EvalReport:
    """Micro-averaged CER/WER over (reference, hypothesis) pairs.

    With ``normalize_first`` both sides are canonicalized before the scoring
    alignment; the raw-text alignment is computed as well so the report can
    state both numbers. ``scores`` may carry precomputed raw
    :func:`score_pair` results (used by parallel callers).

    Raises:
        EmptyCorpus: no pairs, or every reference is empty.
    """
    if not pairs:
        raise EmptyCorpus("no document pairs to evaluate")
    if doc_ids is None:
        doc_ids = [str(i) for i in range(len(pairs))]

    raw_scores = list(scores) if scores is not None else [score_pair(r, h) for r, h in pairs]

    confusion = ConfusionMatrix()
    per_document: list[DocumentScore] = []
    raw_char_errors = raw_word_errors = 0
    raw_chars = raw_words = 0
    for doc_id, (ref, _), (char_dist, word_dist, subs) in zip(doc_ids, pairs, raw_scores):
        for ref_char, hyp_char in subs:
            confusion.add(ref_char, hyp_char, table=table)
        raw_char_errors += char_dist
        raw_word_errors += word_dist
        raw_chars += len(ref)
        raw_words += len(ref.split())
        per_document.append(
            DocumentScore(doc_id, len(ref), len(ref.split()), char_dist, word_dist)
        )
    if raw_chars == 0:
        raise EmptyCorpus("every reference in the corpus is empty")

    raw_cer = raw_char_errors / raw_chars
    raw_wer = raw_word_errors / raw_words if raw_words else 0.0

    if not normalize_first:
        return EvalReport(
            cer=raw_cer,
            wer=raw_wer,
            n_ref_chars=raw_chars,
            n_ref_words=raw_words,
            confusion=confusion,
            per_document=per_document,
            normalized=False,
            raw_cer=raw_cer,
            raw_wer=raw_wer,
        )

    norm_char_errors = norm_word_errors = 0
    norm_chars = norm_words = 0
    norm_per_document: list[DocumentScore] = []
    for doc_id, (ref, hyp) in zip(doc_ids, pairs):
        nref, nhyp = canonicalize(ref, table), canonicalize(hyp, table)
        char_dist, word_dist, _ = score_pair(nref, nhyp)
        norm_char_errors += char_dist
        norm_word_errors += word_dist
        norm_chars += len(nref)
        norm_words += len(nref.split())
        norm_per_document.append(
            DocumentScore(doc_id, len(nref), len(nref.split()), char_dist, word_dist)
        )
    if norm_chars == 0:
        raise EmptyCorpus("every reference in the corpus is empty after normalization")

    return EvalReport(
        cer=norm_char_errors / norm_chars,
        wer=norm_word_errors / norm_words if norm_words else 0.0,
        n_ref_chars=norm_chars,
        n_ref_words=norm_words,
        confusion=confusion,
        per_document=norm_per_document,
        normalized=True,
        raw_cer=raw_cer,
        raw_wer=raw_wer,
    )


def load_pairs_from_dirs(ref_dir: str | Path, hyp_dir: str | Path) -> tuple[list[tuple[str, str]], list[str]]:
    """Pair text files from two directories by filename.

    Raises:
        FileNotFoundError: a reference file has no hypothesis counterpart,
            or a directory is missing.
    """
    ref_dir, hyp_dir = Path(ref_dir), Path(hyp_dir)
    ref_files = sorted(p for p in ref_dir.iterdir() if p.is_file())
    if not ref_files:
        raise EmptyCorpus(f"no reference files in {ref_dir}")
    pairs = []
    ids = []
    for ref_path in ref_files:
        hyp_path = hyp_dir / ref_path.name
        if not hyp_path.is_file():
            raise FileNotFoundError(f"no hypothesis file for {ref_path.name} in {hyp_dir}")
        pairs.append(
            (ref_path.read_text(encoding="utf-8"), hyp_path.read_text(encoding="utf-8"))
        )
        ids.append(ref_path.name)
    return pairs, ids


def load_pairs_from_manifest(path: str | Path) -> tuple[list[tuple[str, str]], list[str]]:
    """Pair files listed in a two-column TSV: ref_path<TAB>hyp_path."""
    base = Path(path).parent
    pairs = []
    ids = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 tab-separated paths")
            ref_path, hyp_path = (base / f if not Path(f).is_absolute() else Path(f) for f in fields)
            pairs.append(
                (ref_path.read_text(encoding="utf-8"), hyp_path.read_text(encoding="utf-8"))
            )
            ids.append(Path(fields[0]).name)
    return pairs, ids
