"""Codepoint-level handling of polytonic Greek.

Nineteenth-century Greek prints carry the full polytonic apparatus
(breathings, three accents, iota subscript, diaeresis, vowel-length
marks), and OCR output for them mixes the two Unicode encodings of the
acute accent: the Greek-and-Coptic "tonos" letters (``U+03AC`` etc.) and
the visually identical Greek Extended "oxia" letters (``U+1F71`` etc.).
This module canonicalizes those duplicate encodings, decomposes letters
into base + diacritics for error analysis, and derives the lowercase
diacritic-free form used as a query-friendly annotation layer.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, TextIO


class NotGreekLetter(ValueError):
    """Raised when a character has no Greek base letter to decompose."""


# Combining marks recognized by the profile decomposition.
COMBINING_SMOOTH = "\u0313"
COMBINING_ROUGH = "\u0314"
COMBINING_ACUTE = "\u0301"
COMBINING_GRAVE = "\u0300"
COMBINING_CIRCUMFLEX = "\u0342"  # Greek perispomeni
COMBINING_IOTA_SUBSCRIPT = "\u0345"
COMBINING_DIAERESIS = "\u0308"
COMBINING_MACRON = "\u0304"
COMBINING_BREVE = "\u0306"

# Greek punctuation with a canonical singleton mapping to a Latin-range
# codepoint (NFC would rewrite them); kept verbatim by every operation.
PROTECTED_PUNCTUATION = frozenset({"\u037e", "\u0387"})  # ; and ano teleia

_GREEK_BLOCKS = ((0x0370, 0x03FF), (0x1F00, 0x1FFF))
_LATIN_BLOCKS = (
    (0x0041, 0x005A),
    (0x0061, 0x007A),
    (0x00C0, 0x024F),  # Latin-1 letters through Latin Extended-B
    (0x1E00, 0x1EFF),  # Latin Extended Additional
)


_CASED_LETTER_CATEGORIES = ("Ll", "Lu", "Lt")


def is_greek_letter(ch: str) -> bool:
    """True when ``ch`` is a single cased letter from the Greek or Greek Extended blocks.

    Modifier signs that share the block (numeral sign, ypogegrammeni) are
    not letters of the alphabet and return False.
    """
    if len(ch) != 1 or unicodedata.category(ch) not in _CASED_LETTER_CATEGORIES:
        return False
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _GREEK_BLOCKS)


def is_latin_letter(ch: str) -> bool:
    """True when ``ch`` is a single cased letter from the common Latin blocks."""
    if len(ch) != 1 or unicodedata.category(ch) not in _CASED_LETTER_CATEGORIES:
        return False
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _LATIN_BLOCKS)


class Breathing(Enum):
    NONE = "none"
    SMOOTH = "smooth"
    ROUGH = "rough"


class Accent(Enum):
    NONE = "none"
    ACUTE = "acute"
    GRAVE = "grave"
    CIRCUMFLEX = "circumflex"


class LengthMark(Enum):
    NONE = "none"
    MACRON = "macron"
    BREVE = "breve"


class LetterCase(Enum):
    UPPER = "upper"
    LOWER = "lower"


_BREATHING_MARKS = {COMBINING_SMOOTH: Breathing.SMOOTH, COMBINING_ROUGH: Breathing.ROUGH}
_ACCENT_MARKS = {
    COMBINING_ACUTE: Accent.ACUTE,
    COMBINING_GRAVE: Accent.GRAVE,
    COMBINING_CIRCUMFLEX: Accent.CIRCUMFLEX,
}
_LENGTH_MARKS = {COMBINING_MACRON: LengthMark.MACRON, COMBINING_BREVE: LengthMark.BREVE}

_BREATHING_CHARS = {v: k for k, v in _BREATHING_MARKS.items()}
_ACCENT_CHARS = {v: k for k, v in _ACCENT_MARKS.items()}
_LENGTH_CHARS = {v: k for k, v in _LENGTH_MARKS.items()}


@dataclass(frozen=True)
class DiacriticProfile:
    """A Greek letter split into its base letter and diacritic dimensions.

    ``base_letter`` is always a lowercase codepoint with an empty canonical
    decomposition; the original case is kept in ``case``.
    """

    base_letter: str
    breathing: Breathing = Breathing.NONE
    accent: Accent = Accent.NONE
    iota_subscript: bool = False
    diaeresis: bool = False
    length_mark: LengthMark = LengthMark.NONE
    case: LetterCase = LetterCase.LOWER

    def compose(self) -> str:
        """Recombine into composed text (one codepoint where Unicode has one).

        Marks are emitted in the order found in canonical decompositions
        (breathing/diaeresis, accent, length, iota subscript) so that NFC
        reassembles the original precomposed letter.
        """
        base = self.base_letter.upper() if self.case is LetterCase.UPPER else self.base_letter
        marks = []
        if self.breathing is not Breathing.NONE:
            marks.append(_BREATHING_CHARS[self.breathing])
        if self.diaeresis:
            marks.append(COMBINING_DIAERESIS)
        if self.accent is not Accent.NONE:
            marks.append(_ACCENT_CHARS[self.accent])
        if self.length_mark is not LengthMark.NONE:
            marks.append(_LENGTH_CHARS[self.length_mark])
        if self.iota_subscript:
            marks.append(COMBINING_IOTA_SUBSCRIPT)
        return unicodedata.normalize("NFC", base + "".join(marks))


def decompose_profile(ch: str) -> DiacriticProfile:
    """Split one Greek character (or base + combining marks) into a profile.

    Accepts a single precomposed codepoint or a short combining sequence,
    which is what :meth:`DiacriticProfile.compose` may return for mark
    combinations Unicode does not precompose.

    Raises:
        NotGreekLetter: the base is not a Greek letter (Latin, digits,
            punctuation, lone combining marks).
        ValueError: more than one base letter was passed.
    """
    if not ch:
        raise ValueError("empty string passed to decompose_profile")
    nfd = unicodedata.normalize("NFD", ch)
    base, marks = nfd[0], nfd[1:]
    if any(not unicodedata.combining(m) for m in marks):
        raise ValueError(f"expected a single character, got {ch!r}")
    if not is_greek_letter(base):
        raise NotGreekLetter(f"no Greek base letter in {ch!r}")

    breathing = Breathing.NONE
    accent = Accent.NONE
    length = LengthMark.NONE
    iota_sub = False
    diaeresis = False
    for m in marks:
        if m in _BREATHING_MARKS:
            breathing = _BREATHING_MARKS[m]
        elif m in _ACCENT_MARKS:
            accent = _ACCENT_MARKS[m]
        elif m in _LENGTH_MARKS:
            length = _LENGTH_MARKS[m]
        elif m == COMBINING_IOTA_SUBSCRIPT:
            iota_sub = True
        elif m == COMBINING_DIAERESIS:
            diaeresis = True
        # other combining marks carry no slot in the profile and are dropped

    case = LetterCase.UPPER if base.isupper() else LetterCase.LOWER
    return DiacriticProfile(
        base_letter=base.lower(),
        breathing=breathing,
        accent=accent,
        iota_subscript=iota_sub,
        diaeresis=diaeresis,
        length_mark=length,
        case=case,
    )


def base_letter(ch: str) -> str:
    """Lowercase base codepoint of any letter (Greek or not), marks stripped."""
    return unicodedata.normalize("NFD", ch)[0].lower()


# The systematic duplicate class: every Greek Extended letter that encodes
# an acute with oxia and has an identical-looking tonos letter in the
# Greek-and-Coptic block. Lowercase, dialytika, and uppercase rows.
OXIA_TONOS_PAIRS: tuple[tuple[str, str], ...] = (
    ("\u1f71", "\u03ac"),  # alpha
    ("\u1f73", "\u03ad"),  # epsilon
    ("\u1f75", "\u03ae"),  # eta
    ("\u1f77", "\u03af"),  # iota
    ("\u1f79", "\u03cc"),  # omicron
    ("\u1f7b", "\u03cd"),  # upsilon
    ("\u1f7d", "\u03ce"),  # omega
    ("\u1fd3", "\u0390"),  # iota with dialytika
    ("\u1fe3", "\u03b0"),  # upsilon with dialytika
    ("\u1fbb", "\u0386"),  # Alpha
    ("\u1fc9", "\u0388"),  # Epsilon
    ("\u1fcb", "\u0389"),  # Eta
    ("\u1fdb", "\u038a"),  # Iota
    ("\u1ff9", "\u038c"),  # Omicron
    ("\u1feb", "\u038e"),  # Upsilon
    ("\u1ffb", "\u038f"),  # Omega
)


class CanonicalizationTable:
    """Variant-to-canonical codepoint mapping applied by :func:`canonicalize`.

    The mapping is validated to be chain-free: a canonical target never
    appears among the variants, so applying the table twice equals applying
    it once.
    """

    def __init__(self, pairs: Iterable[tuple[str, str]]):
        mapping: dict[str, str] = {}
        for variant, canon in pairs:
            if len(variant) != 1 or len(canon) != 1:
                raise ValueError(f"table entries must be single codepoints: {variant!r} -> {canon!r}")
            if variant == canon:
                raise ValueError(f"variant maps to itself: {variant!r}")
            if variant in mapping and mapping[variant] != canon:
                raise ValueError(f"conflicting targets for variant {variant!r}")
            if unicodedata.normalize("NFC", canon) != canon:
                raise ValueError(f"canonical target {canon!r} is not NFC-stable")
            mapping[variant] = canon
        for canon in mapping.values():
            if canon in mapping:
                raise ValueError(f"canonical codepoint {canon!r} also appears as a variant")
        self._mapping = mapping
        self._translate = {ord(v): c for v, c in mapping.items()}

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self._mapping.items()))

    def __len__(self) -> int:
        return len(self._mapping)

    def __contains__(self, variant: str) -> bool:
        return variant in self._mapping

    def target(self, variant: str) -> str | None:
        return self._mapping.get(variant)

    def apply(self, text: str) -> str:
        return text.translate(self._translate)

    @classmethod
    def default(cls) -> "CanonicalizationTable":
        return _DEFAULT_TABLE

    @classmethod
    def load(cls, path: str | Path) -> "CanonicalizationTable":
        """Read a table from TSV: ``variant_hex<TAB>canonical_hex``, '#' comments."""
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 2 tab-separated fields")
                try:
                    variant, canon = (chr(int(f, 16)) for f in fields)
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: bad codepoint hex: {line!r}") from exc
                pairs.append((variant, canon))
        return cls(pairs)

    def save(self, sink: str | Path | TextIO) -> None:
        lines = [f"{ord(v):04X}\t{ord(c):04X}\n" for v, c in self.pairs]
        if hasattr(sink, "write"):
            sink.writelines(lines)
        else:
            Path(sink).write_text("".join(lines), encoding="utf-8")


_DEFAULT_TABLE = CanonicalizationTable(OXIA_TONOS_PAIRS)


def _nfc_segments(text: str) -> str:
    """NFC over runs between protected punctuation, which is kept verbatim."""
    if not any(p in text for p in PROTECTED_PUNCTUATION):
        return unicodedata.normalize("NFC", text)
    out: list[str] = []
    start = 0
    for i, ch in enumerate(text):
        if ch in PROTECTED_PUNCTUATION:
            out.append(unicodedata.normalize("NFC", text[start:i]))
            out.append(ch)
            start = i + 1
    out.append(unicodedata.normalize("NFC", text[start:]))
    return "".join(out)


def canonicalize(text: str, table: CanonicalizationTable | None = None) -> str:
    """Rewrite duplicate encodings to one canonical, composed form.

    Applies the table, composes (NFC), and applies the table once more to
    catch variants that only appear after composition. The Greek question
    mark and ano teleia are preserved verbatim even though NFC would
    rewrite them to their Latin-range lookalikes.
    """
    if table is None:
        table = _DEFAULT_TABLE
    return table.apply(_nfc_segments(table.apply(text)))


def intuitive_form(text: str, fold_final_sigma: bool = True) -> str:
    """Lowercase, diacritic-free rendering for plain-keyboard lexical queries.

    All combining marks are stripped, every letter is lowercased, and final
    sigma folds to medial sigma so that word-final and word-internal
    occurrences match the same query (set ``fold_final_sigma=False`` to keep
    the positional variant). Non-letters pass through unchanged.
    """
    out: list[str] = []
    for segment, protected in _split_protected(text):
        if protected:
            out.append(segment)
            continue
        lowered = unicodedata.normalize("NFD", segment).lower()
        # lowercasing can itself introduce combining marks, decompose again
        stripped = "".join(
            ch for ch in unicodedata.normalize("NFD", lowered) if not unicodedata.combining(ch)
        )
        out.append(stripped)
    result = "".join(out)
    if fold_final_sigma:
        result = result.replace("ς", "σ")
    return result


def _split_protected(text: str):
    start = 0
    for i, ch in enumerate(text):
        if ch in PROTECTED_PUNCTUATION:
            if start < i:
                yield text[start:i], False
            yield ch, True
            start = i + 1
    if start < len(text):
        yield text[start:], False
