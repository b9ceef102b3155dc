"""Canonicalizing polytonic Greek: duplicate encodings, profiles, intuitive forms.

OCR output for nineteenth-century Greek prints mixes two Unicode encodings
of accented vowels: "tonos" letters from the Greek-and-Coptic block and
visually identical "oxia" letters from Greek Extended. This walkthrough
shows how pgforge merges them and derives query-friendly forms.

Run: python3 demos/01_canonicalization.py
"""

import unicodedata

from pgforge import (
    CanonicalizationTable,
    canonicalize,
    decompose_profile,
    intuitive_form,
)

# Two strings that render identically but compare unequal: the first uses
# tonos codepoints, the second the oxia duplicates.
tonos_text = "άίό"
oxia_text = "\u1f71\u1f77\u1f79"
print("tonos:", tonos_text, [f"U+{ord(c):04X}" for c in tonos_text])
print("oxia: ", oxia_text, [f"U+{ord(c):04X}" for c in oxia_text])
print("equal before canonicalization:", tonos_text == oxia_text)
print("equal after canonicalization: ", canonicalize(tonos_text) == canonicalize(oxia_text))
print()

# The default table covers the whole duplicate class, uppercase included.
table = CanonicalizationTable.default()
print(f"default table has {len(table)} pairs, e.g.:")
for variant, canonical in table.pairs[:4]:
    print(f"  U+{ord(variant):04X} {variant} -> U+{ord(canonical):04X} {canonical}")
print()

# Decomposition separates letter identity from the diacritics, which is how
# the error taxonomy decides whether OCR got the letter right.
for ch in ["ᾁ", "ΐ", "ᾷ"]:
    profile = decompose_profile(ch)
    print(
        f"{ch}  base={profile.base_letter} breathing={profile.breathing.value}"
        f" accent={profile.accent.value} iota_subscript={profile.iota_subscript}"
        f" diaeresis={profile.diaeresis}"
    )
    assert decompose_profile(profile.compose()) == profile
print()

# The intuitive form is the lowercase diacritic-free layer: it lets users
# search a corpus without typing polytonic orthography.
sample = "Ἐν ἀρχῇ ἦν ὁ Λόγος."
print(f"wordforms: {sample}")
print(f"intuitive: {intuitive_form(sample)}")

# Greek punctuation is kept verbatim even though plain NFC would fold the
# question mark and ano teleia into their Latin lookalikes.
punctuated = "τίς\u037e λόγος\u0387"
assert canonicalize(punctuated).count("\u037e") == 1
assert unicodedata.normalize("NFC", punctuated).count("\u037e") == 0
print("\nGreek punctuation survives canonicalization:", canonicalize(punctuated))
