"""Building the five-layer vertical corpus: tokenize, annotate, emit, verify.

Each token line carries wordform, intuitive form, lemma, intuitive lemma,
and a POS tag; structural tags keep document, page, line, and word ids.

Run: python3 demos/06_vert_corpus.py
"""

from pgforge import (
    Lexicon,
    annotate,
    build_document,
    corpus_stats,
    parse_page_xml,
    parse_vert,
    tokenize,
    validate_vert,
    vert_string,
)

# Tokenization splits boundary punctuation off but keeps elision marks
# attached to the word they elide.
for line in ["ὁ λόγος.", "ἀλλ’ ἐγώ", "«θεός»"]:
    print(f"{line!r:20} -> {tokenize(line)}")
print()

# The lexicon maps canonicalized wordforms to (lemma, pos) candidates.
lexicon = Lexicon(
    [
        ("Ἐν", "ἐν", "PREP"),
        ("ἀρχῇ", "ἀρχή", "N"),
        ("ἦν", "εἰμί", "V"),
        ("ὁ", "ὁ", "ART"),
        ("Λόγος", "λόγος", "N"),
        ("καὶ", "καί", "CONJ"),
    ]
)
token = annotate("Λόγος", lexicon)
print("annotated:", token.wordform, token.intuitive, token.lemma,
      token.intuitive_lemma, token.pos)
unknown = annotate("ξένον", lexicon)
print("unknown:  ", unknown.wordform, unknown.pos, "(falls back to wordform as lemma)")
print()

# A page goes through filtering, cleanup, and annotation into a document.
PAGE_XML = """<?xml version="1.0"?>
<PcGts>
  <Page imageFilename="p117.png" imageWidth="2000" imageHeight="3000">
    <TextRegion id="greek" custom="structure {type:MainText_ColGreek;}">
      <Coords points="120,400 980,400 980,2700 120,2700"/>
      <TextLine id="l0"><TextEquiv><Unicode>Ἐν ἀρχῇ ἦν ὁ Λό-</Unicode></TextEquiv></TextLine>
      <TextLine id="l1"><TextEquiv><Unicode>γος, καὶ ὁ Λόγος ἦν.</Unicode></TextEquiv></TextLine>
    </TextRegion>
    <TextRegion id="latin" custom="structure {type:MainText_ColLatin;}">
      <Coords points="1020,400 1880,400 1880,2700 1020,2700"/>
      <TextLine id="m0"><TextEquiv><Unicode>In principio erat Verbum.</Unicode></TextEquiv></TextLine>
    </TextRegion>
  </Page>
</PcGts>
"""

page = parse_page_xml(PAGE_XML)
doc = build_document("PG003", [page], lexicon)
wire = vert_string(doc)
print(wire)

# The wire format round-trips and an independent pass re-derives the
# intuitive layers from the bytes.
assert parse_vert(wire) == doc
assert validate_vert(wire) == []

stats = corpus_stats([doc])
print(f"word count (punctuation excluded): {stats.total}")
