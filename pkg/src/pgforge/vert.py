"""Five-layer vertical corpus format: tokenization, annotation, emission.

Each word token carries the OCR wordform, its lowercase diacritic-free
form, a lemma, the diacritic-free lemma, and a morpho-syntactic tag.
Structural tags keep document, page, and line identifiers so every token
traces back to its position in the source scan.

Wire format (UTF-8, LF, no BOM)::

    <doc id="...">
    <page n="1" pdf="...">
    <line id="...">
    <w id="w1">
    wordform<TAB>intuitive<TAB>lemma<TAB>intuitive_lemma<TAB>pos
    </w>
    </line>
    </page>
    </doc>
"""

from __future__ import annotations

import csv
import io
import re
import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Iterable, Sequence

from .cleanup import DEFAULT_LATIN_LINE_THRESHOLD, ProvenanceLog, clean_pairs
from .greek import CanonicalizationTable, canonicalize, intuitive_form
from .layout import Page, filter_relevant, linearize


class MalformedVert(ValueError):
    """Parse failure in a vertical corpus file, with the offending line."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


# Elision marks stay glued to the word they elide: koronis, typographic
# and ASCII apostrophes, modifier apostrophe.
ELISION_MARKS = frozenset({"\u1fbd", "\u2019", "'", "\u02bc"})


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def tokenize(line: str) -> list[str]:
    """Whitespace split, then peel leading/trailing punctuation into tokens.

    An elision mark directly after a letter stays attached ("ἀλλ'" is one
    token); every other boundary punctuation character becomes its own
    token, in textual order.
    """
    tokens: list[str] = []
    for chunk in line.split():
        while chunk and _is_punct(chunk[0]):
            tokens.append(chunk[0])
            chunk = chunk[1:]
        trailing: list[str] = []
        while chunk and _is_punct(chunk[-1]):
            if chunk[-1] in ELISION_MARKS and len(chunk) >= 2 and chunk[-2].isalpha():
                break
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trailing))
    return tokens


_FORBIDDEN_IN_FIELD = ("\t", "\n")


@dataclass(frozen=True)
class Token:
    """One annotated word with its five layers and traceability ids."""

    wordform: str
    intuitive: str
    lemma: str
    intuitive_lemma: str
    pos: str
    word_id: str = ""
    line_id: str = ""
    page_ref: str = ""
    doc_id: str = ""

    def __post_init__(self):
        for name in ("wordform", "intuitive", "lemma", "intuitive_lemma", "pos"):
            value = getattr(self, name)
            if any(bad in value for bad in _FORBIDDEN_IN_FIELD):
                raise ValueError(f"token field {name} contains tab or newline: {value!r}")

    @property
    def is_unknown(self) -> bool:
        return self.pos == "UNK" and self.lemma == self.wordform


UNKNOWN_POS = "UNK"


class Lexicon:
    """Wordform to (lemma, pos) lookup with canonicalized, case-sensitive keys.

    Candidate order is priority order; ambiguous entries keep every
    candidate so a downstream disambiguator can revisit the choice.
    """

    def __init__(self, entries: Iterable[tuple[str, str, str]] = (),
                 table: CanonicalizationTable | None = None):
        self._table = table
        self._entries: dict[str, list[tuple[str, str]]] = {}
        for wordform, lemma, pos in entries:
            self.add(wordform, lemma, pos)

    def add(self, wordform: str, lemma: str, pos: str) -> None:
        key = canonicalize(wordform, self._table)
        candidates = self._entries.setdefault(key, [])
        if (lemma, pos) not in candidates:
            candidates.append((lemma, pos))

    def lookup(self, wordform: str) -> list[tuple[str, str]]:
        return list(self._entries.get(canonicalize(wordform, self._table), ()))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, wordform: str) -> bool:
        return canonicalize(wordform, self._table) in self._entries

    @classmethod
    def load(cls, path: str | Path,
             table: CanonicalizationTable | None = None) -> "Lexicon":
        """TSV: wordform<TAB>lemma<TAB>pos, repeated wordforms for ambiguity."""
        lexicon = cls(table=table)
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 3:
                    raise ValueError(
                        f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
                    )
                lexicon.add(*fields)
        return lexicon


def annotate(wordform: str, lexicon: Lexicon,
             table: CanonicalizationTable | None = None) -> Token:
    """Fill the five annotation layers for one wordform.

    The first lexicon candidate wins; forms not in the lexicon fall back to
    lemma = wordform with the UNK tag. The intuitive layers are always
    derived, lexicon hit or not.
    """
    if not wordform:
        raise ValueError("cannot annotate an empty wordform")
    candidates = lexicon.lookup(wordform)
    if candidates:
        lemma, pos = candidates[0]
    else:
        lemma, pos = wordform, UNKNOWN_POS
    return Token(
        wordform=wordform,
        intuitive=intuitive_form(wordform),
        lemma=lemma,
        intuitive_lemma=intuitive_form(lemma),
        pos=pos,
    )


@dataclass(frozen=True)
class VertLine:
    line_id: str
    tokens: tuple[Token, ...] = ()


@dataclass(frozen=True)
class VertPage:
    page_ref: str
    lines: tuple[VertLine, ...] = ()


@dataclass(frozen=True)
class VertDocument:
    doc_id: str
    pages: tuple[VertPage, ...] = ()


_ID_RE = re.compile(r'^[^"\t\n]*$')


def _check_id(kind: str, value: str) -> str:
    if not _ID_RE.match(value):
        raise ValueError(f"{kind} id {value!r} may not contain quotes, tabs, or newlines")
    return value


def emit_vert(doc: VertDocument, sink: IO[str]) -> None:
    """Write the document in the wire format; deterministic byte-for-byte."""
    sink.write(f'<doc id="{_check_id("doc", doc.doc_id)}">\n')
    for n, page in enumerate(doc.pages, start=1):
        sink.write(f'<page n="{n}" pdf="{_check_id("page", page.page_ref)}">\n')
        for line in page.lines:
            sink.write(f'<line id="{_check_id("line", line.line_id)}">\n')
            for token in line.tokens:
                sink.write(f'<w id="{_check_id("word", token.word_id)}">\n')
                sink.write(
                    f"{token.wordform}\t{token.intuitive}\t{token.lemma}"
                    f"\t{token.intuitive_lemma}\t{token.pos}\n"
                )
                sink.write("</w>\n")
            sink.write("</line>\n")
        sink.write("</page>\n")
    sink.write("</doc>\n")


def vert_string(doc: VertDocument) -> str:
    buf = io.StringIO()
    emit_vert(doc, buf)
    return buf.getvalue()


def write_vert(doc: VertDocument, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        emit_vert(doc, fh)


_DOC_RE = re.compile(r'^<doc id="([^"]*)">$')
_PAGE_RE = re.compile(r'^<page n="(\d+)" pdf="([^"]*)">$')
_LINE_RE = re.compile(r'^<line id="([^"]*)">$')
_W_RE = re.compile(r'^<w id="([^"]*)">$')


def parse_vert_many(source: str | IO[str]) -> list[VertDocument]:
    """Parse every document in a vertical file.

    Raises:
        MalformedVert: structural violations, wrong field counts, ids reused
            within their scope.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = source
    docs: list[VertDocument] = []

    doc_id: str | None = None
    pages: list[VertPage] = []
    page_ref: str | None = None
    page_lines: list[VertLine] = []
    line_id: str | None = None
    tokens: list[Token] = []
    word_id: str | None = None
    token_row: Token | None = None
    seen_pages: set[str] = set()
    seen_lines: set[str] = set()
    seen_words: set[str] = set()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        if word_id is not None and token_row is None:
            fields = raw.split("\t")
            if len(fields) != 5:
                raise MalformedVert(line_no, f"expected 5 tab-separated fields, got {len(fields)}")
            token_row = Token(
                wordform=fields[0],
                intuitive=fields[1],
                lemma=fields[2],
                intuitive_lemma=fields[3],
                pos=fields[4],
                word_id=word_id,
                line_id=line_id or "",
                page_ref=page_ref or "",
                doc_id=doc_id or "",
            )
            continue
        if raw == "</w>":
            if word_id is None:
                raise MalformedVert(line_no, "</w> without <w>")
            if token_row is None:
                raise MalformedVert(line_no, "<w> element contains no token line")
            tokens.append(token_row)
            word_id = None
            token_row = None
            continue
        m = _W_RE.match(raw)
        if m:
            if line_id is None:
                raise MalformedVert(line_no, "<w> outside <line>")
            if word_id is not None:
                raise MalformedVert(line_no, "nested <w>")
            word_id = m.group(1)
            if word_id in seen_words:
                raise MalformedVert(line_no, f"word id {word_id!r} reused in document")
            seen_words.add(word_id)
            continue
        m = _LINE_RE.match(raw)
        if m:
            if page_ref is None:
                raise MalformedVert(line_no, "<line> outside <page>")
            if line_id is not None:
                raise MalformedVert(line_no, "nested <line>")
            line_id = m.group(1)
            if line_id in seen_lines:
                raise MalformedVert(line_no, f"line id {line_id!r} reused in page")
            seen_lines.add(line_id)
            tokens = []
            continue
        if raw == "</line>":
            if line_id is None:
                raise MalformedVert(line_no, "</line> without <line>")
            if word_id is not None:
                raise MalformedVert(line_no, "unclosed <w> at </line>")
            page_lines.append(VertLine(line_id=line_id, tokens=tuple(tokens)))
            line_id = None
            continue
        m = _PAGE_RE.match(raw)
        if m:
            if doc_id is None:
                raise MalformedVert(line_no, "<page> outside <doc>")
            if page_ref is not None:
                raise MalformedVert(line_no, "nested <page>")
            page_ref = m.group(2)
            if page_ref in seen_pages:
                raise MalformedVert(line_no, f"page ref {page_ref!r} reused in document")
            seen_pages.add(page_ref)
            page_lines = []
            seen_lines = set()
            continue
        if raw == "</page>":
            if page_ref is None:
                raise MalformedVert(line_no, "</page> without <page>")
            if line_id is not None:
                raise MalformedVert(line_no, "unclosed <line> at </page>")
            pages.append(VertPage(page_ref=page_ref, lines=tuple(page_lines)))
            page_ref = None
            continue
        m = _DOC_RE.match(raw)
        if m:
            if doc_id is not None:
                raise MalformedVert(line_no, "nested <doc>")
            doc_id = m.group(1)
            pages = []
            seen_pages = set()
            seen_words = set()
            continue
        if raw == "</doc>":
            if doc_id is None:
                raise MalformedVert(line_no, "</doc> without <doc>")
            if page_ref is not None:
                raise MalformedVert(line_no, "unclosed <page> at </doc>")
            docs.append(VertDocument(doc_id=doc_id, pages=tuple(pages)))
            doc_id = None
            continue
        if not raw.strip():
            continue
        raise MalformedVert(line_no, f"unrecognized line: {raw!r}")

    if doc_id is not None:
        raise MalformedVert(len(text.splitlines()), "unclosed <doc> at end of input")
    return docs


def parse_vert(source: str | IO[str]) -> VertDocument:
    """Parse a vertical file that holds exactly one document."""
    docs = parse_vert_many(source)
    if len(docs) != 1:
        raise MalformedVert(0, f"expected exactly one document, found {len(docs)}")
    return docs[0]


def validate_vert(source: str | IO[str]) -> list[tuple[int, str]]:
    """Independent check of the derived layers on the wire.

    Recomputes the intuitive form of fields 1 and 3 on every token line and
    returns (line_no, message) for each mismatch. Works on the raw text, so
    it validates files produced by any writer.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = source
    problems: list[tuple[int, str]] = []
    in_w = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if _W_RE.match(raw):
            in_w = True
            continue
        if raw == "</w>":
            in_w = False
            continue
        if in_w:
            fields = raw.split("\t")
            if len(fields) != 5:
                problems.append((line_no, f"expected 5 fields, got {len(fields)}"))
                continue
            if fields[1] != intuitive_form(fields[0]):
                problems.append(
                    (line_no, f"field 2 is not the intuitive form of field 1: {raw!r}")
                )
            if fields[3] != intuitive_form(fields[2]):
                problems.append(
                    (line_no, f"field 4 is not the intuitive form of field 3: {raw!r}")
                )
    return problems


def _counts_as_word(token: Token) -> bool:
    # pure punctuation does not count toward corpus size
    return any(ch.isalnum() for ch in token.wordform)


@dataclass
class CorpusStats:
    per_doc: list[tuple[str, int]]
    total: int


def corpus_stats(docs: Sequence[VertDocument]) -> CorpusStats:
    """Word counts per document and overall, punctuation tokens excluded."""
    per_doc = []
    total = 0
    for doc in docs:
        count = sum(
            _counts_as_word(token)
            for page in doc.pages
            for line in page.lines
            for token in line.tokens
        )
        per_doc.append((doc.doc_id, count))
        total += count
    return CorpusStats(per_doc=per_doc, total=total)


def write_stats_csv(stats: CorpusStats, path: str | Path,
                    dates: dict[str, str] | None = None) -> None:
    """CSV: doc_id, date_label, word_count; grand total in the last row."""
    dates = dates or {}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id", "date_label", "word_count"])
        for doc_id, count in stats.per_doc:
            writer.writerow([doc_id, dates.get(doc_id, ""), count])
        writer.writerow(["TOTAL", "", stats.total])


@dataclass
class AmbiguityRecord:
    word_id: str
    wordform: str
    candidates: list[tuple[str, str]]


def build_document(
    doc_id: str,
    pages: Sequence[Page],
    lexicon: Lexicon,
    *,
    latin_threshold: float = DEFAULT_LATIN_LINE_THRESHOLD,
    table: CanonicalizationTable | None = None,
    normalize: bool = True,
    log: ProvenanceLog | None = None,
    ambiguities: list[AmbiguityRecord] | None = None,
) -> VertDocument:
    """Run layout pages through the full pipeline into one vert document.

    Per page: keep relevant regions, linearize, clean (with provenance),
    then tokenize and annotate. Word ids are sequential across the
    document in emission order.
    """
    vert_pages: list[VertPage] = []
    word_seq = 0
    for page in pages:
        lines = linearize(filter_relevant(page))
        if normalize:
            lines = [(line_id, canonicalize(text, table)) for line_id, text in lines]
        cleaned = clean_pairs(lines, latin_threshold=latin_threshold, log=log)
        vert_lines: list[VertLine] = []
        for line_id, text in cleaned:
            tokens: list[Token] = []
            for wordform in tokenize(text):
                word_seq += 1
                token = annotate(wordform, lexicon, table)
                token = replace(
                    token,
                    word_id=f"w{word_seq}",
                    line_id=line_id,
                    page_ref=page.image_ref,
                    doc_id=doc_id,
                )
                if ambiguities is not None:
                    candidates = lexicon.lookup(wordform)
                    if len(candidates) > 1:
                        ambiguities.append(
                            AmbiguityRecord(token.word_id, wordform, candidates)
                        )
                tokens.append(token)
            vert_lines.append(VertLine(line_id=line_id, tokens=tuple(tokens)))
        vert_pages.append(VertPage(page_ref=page.image_ref, lines=tuple(vert_lines)))
    return VertDocument(doc_id=doc_id, pages=tuple(vert_pages))
