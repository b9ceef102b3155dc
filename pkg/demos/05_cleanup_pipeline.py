"""Cleaning raw OCR lines: dehyphenation, empty lines, Latin filtering.

Every edit lands in a provenance log and anything dubious is flagged for
review instead of silently decided; corpus users need to trace each token
back to its source line.

Run: python3 demos/05_cleanup_pipeline.py
"""

import json

from pgforge import ProvenanceLog, clean_pairs, dehyphenate, drop_empty_lines, filter_latin

# Linearized lines from a column, with ids carried along.
raw = [
    ("p117_l0", "Ἐν ἀρχῇ ἦν ὁ Λόγος, καὶ ὁ Λόγος ἦν"),
    ("p117_l1", "πρὸς τὸν Θεόν, καὶ Θεὸς ἦν ὁ Λό-"),
    ("p117_l2", "γος. οὗτος ἦν ἐν ἀρχῇ πρὸς τὸν Θεόν."),
    ("p117_l3", ""),
    ("p117_l4", "In principio erat Verbum."),
    ("p117_l5", "ὁ λόγος est μέγας"),
]

# The individual operations work on plain line lists.
print("dehyphenate:", dehyphenate(["θεολο-", "γία καί"]))
print("drop_empty: ", drop_empty_lines(["α", "", "β"]))
print("filter_latin:", filter_latin(["ὁ λόγος est μέγας", "Sancti Patris"]))
print()

# The composed pipeline runs drop-empties, dehyphenate, filter-Latin until
# stable, with provenance.
log = ProvenanceLog()
cleaned = clean_pairs(raw, latin_threshold=0.5, log=log)
print("cleaned lines:")
for line_id, text in cleaned:
    print(f"  {line_id}: {text}")
print()

print("provenance log:")
print(json.dumps(log.to_json_dict(), ensure_ascii=False, indent=2))
print()
print("review flags:", [e["action"] for e in log.flags])
