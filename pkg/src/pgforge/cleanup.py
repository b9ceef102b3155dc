"""Raw OCR text cleanup before annotation.

Dehyphenation, empty-line removal, and Latin filtering. Every edit is
recorded in a provenance log and dubious cases are flagged for review
rather than silently decided: downstream corpus users need to trace each
surviving token back to its source line.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .greek import is_greek_letter, is_latin_letter

# Hyphen shapes found at line ends in this material. U+00AD (soft hyphen)
# shows up in OCR output occasionally; U+2010/2011 are typographic hyphens.
DEFAULT_HYPHENS = frozenset({"-", "\u00ad", "\u2010", "\u2011"})

DEFAULT_LATIN_LINE_THRESHOLD = 0.5


@dataclass
class ProvenanceLog:
    """Append-only record of cleanup edits and review flags."""

    entries: list[dict] = field(default_factory=list)

    def record(self, op: str, action: str, **details) -> None:
        entry = {"op": op, "action": action}
        entry.update(details)
        self.entries.append(entry)

    def extend(self, other: "ProvenanceLog") -> None:
        self.entries.extend(other.entries)

    @property
    def flags(self) -> list[dict]:
        return [e for e in self.entries if e["action"].startswith("flag")]

    def to_json_dict(self) -> list[dict]:
        return list(self.entries)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.entries, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )


def _with_ids(lines: list[str], ids: list[str] | None) -> list[tuple[str, str]]:
    if ids is None:
        ids = [str(i) for i in range(len(lines))]
    if len(ids) != len(lines):
        raise ValueError("ids and lines must have the same length")
    return list(zip(ids, lines))


def drop_empty_pairs(
    pairs: list[tuple[str, str]], log: ProvenanceLog | None = None
) -> list[tuple[str, str]]:
    kept = []
    for line_id, text in pairs:
        if text.strip():
            kept.append((line_id, text))
        elif log is not None:
            log.record("drop_empty_lines", "drop_line", line_id=line_id, content=text)
    return kept


def drop_empty_lines(lines: list[str], ids: list[str] | None = None,
                     log: ProvenanceLog | None = None) -> list[str]:
    """Remove empty and whitespace-only lines, order preserved."""
    return [text for _, text in drop_empty_pairs(_with_ids(lines, ids), log)]


def dehyphenate_pairs(
    pairs: list[tuple[str, str]],
    log: ProvenanceLog | None = None,
    hyphens: frozenset[str] = DEFAULT_HYPHENS,
) -> list[tuple[str, str]]:
    work = deque(pairs)
    out: list[tuple[str, str]] = []
    while work:
        line_id, text = work.popleft()
        while True:
            stripped = text.rstrip()
            if not stripped or stripped[-1] not in hyphens:
                break
            if not work:
                if log is not None:
                    log.record(
                        "dehyphenate", "flag_hyphen_final_last_line",
                        line_id=line_id, content=text,
                    )
                break
            donor_id, donor_text = work[0]
            donor_tokens = donor_text.split()
            if not donor_tokens:
                if log is not None:
                    log.record(
                        "dehyphenate", "flag_no_continuation_token",
                        line_id=line_id, next_line_id=donor_id,
                    )
                break
            first = donor_tokens[0]
            text = stripped[:-1] + first
            if log is not None:
                log.record(
                    "dehyphenate", "merge",
                    line_id=line_id, next_line_id=donor_id, moved_token=first,
                )
            remainder = donor_text.lstrip()[len(first):].lstrip()
            if remainder:
                work[0] = (donor_id, remainder)
            else:
                work.popleft()
                if log is not None:
                    log.record(
                        "dehyphenate", "drop_consumed_line",
                        line_id=donor_id,
                    )
        out.append((line_id, text))
    return out


def dehyphenate(lines: list[str], ids: list[str] | None = None,
                log: ProvenanceLog | None = None,
                hyphens: frozenset[str] = DEFAULT_HYPHENS) -> list[str]:
    """Merge line-final hyphenated fragments with the next line's first token.

    A line left hyphen-final with nothing to merge (last line, or an empty
    follower) is kept as-is and flagged. A continuation line whose only
    token was consumed is removed, with the removal logged.
    """
    return [text for _, text in dehyphenate_pairs(_with_ids(lines, ids), log, hyphens)]


def _letters(text: str) -> list[str]:
    return [c for c in text if c.isalpha()]


def _token_is_latin(token: str) -> bool:
    letters = _letters(token)
    return bool(letters) and all(is_latin_letter(c) for c in letters)


def _token_is_mixed(token: str) -> bool:
    letters = _letters(token)
    return any(is_latin_letter(c) for c in letters) and any(is_greek_letter(c) for c in letters)


def filter_latin_pairs(
    pairs: list[tuple[str, str]],
    line_threshold: float = DEFAULT_LATIN_LINE_THRESHOLD,
    log: ProvenanceLog | None = None,
) -> list[tuple[str, str]]:
    if not (0.0 <= line_threshold <= 1.0):
        raise ValueError(f"line_threshold must be in [0, 1], got {line_threshold}")
    out: list[tuple[str, str]] = []
    for line_id, text in pairs:
        letters = _letters(text)
        if letters:
            latin_fraction = sum(is_latin_letter(c) for c in letters) / len(letters)
            if latin_fraction > line_threshold:
                if log is not None:
                    log.record(
                        "filter_latin", "drop_line",
                        line_id=line_id, content=text,
                        latin_fraction=round(latin_fraction, 4),
                    )
                continue
        kept_tokens = []
        dropped_any = False
        for token in text.split():
            if _token_is_latin(token):
                dropped_any = True
                if log is not None:
                    log.record("filter_latin", "drop_token", line_id=line_id, content=token)
                continue
            if _token_is_mixed(token) and log is not None:
                log.record("filter_latin", "flag_mixed_script_token",
                           line_id=line_id, content=token)
            kept_tokens.append(token)
        # leave untouched lines byte-identical; rejoin only when edited
        out.append((line_id, " ".join(kept_tokens) if dropped_any else text))
    return out


def filter_latin(lines: list[str], line_threshold: float = DEFAULT_LATIN_LINE_THRESHOLD,
                 ids: list[str] | None = None,
                 log: ProvenanceLog | None = None) -> list[str]:
    """Drop mostly-Latin lines, then purely Latin tokens within kept lines.

    A line is dropped when the Latin share of its letters exceeds the
    threshold. A token is Latin when it has at least one letter and every
    letter is Latin (attached punctuation does not save it). Mixed-script
    tokens are never removed, only flagged.
    """
    return [text for _, text in filter_latin_pairs(_with_ids(lines, ids), line_threshold, log)]


def clean_pairs(
    pairs: list[tuple[str, str]],
    latin_threshold: float = DEFAULT_LATIN_LINE_THRESHOLD,
    log: ProvenanceLog | None = None,
    hyphens: frozenset[str] = DEFAULT_HYPHENS,
) -> list[tuple[str, str]]:
    """Composed cleanup: drop empties, dehyphenate, filter Latin, to a fixed point.

    One pass is usually enough, but a pass can expose new work for an
    earlier stage (dropping a trailing Latin token can leave a line
    hyphen-final), so the fixed sequence repeats until nothing changes.
    Each changing pass strictly shrinks the text, so this terminates.

    Edits are logged from the pass that made them; review flags are logged
    once, from the final pass, so persistent flags are not duplicated.
    """
    while True:
        pass_log = ProvenanceLog() if log is not None else None
        new_pairs = drop_empty_pairs(pairs, pass_log)
        new_pairs = dehyphenate_pairs(new_pairs, pass_log, hyphens)
        new_pairs = filter_latin_pairs(new_pairs, latin_threshold, pass_log)
        changed = new_pairs != pairs
        if log is not None:
            for entry in pass_log.entries:
                if changed and not entry["action"].startswith("flag"):
                    log.entries.append(entry)
                elif not changed and entry["action"].startswith("flag"):
                    log.entries.append(entry)
        if not changed:
            return new_pairs
        pairs = new_pairs


def clean_lines(lines: list[str], ids: list[str] | None = None,
                latin_threshold: float = DEFAULT_LATIN_LINE_THRESHOLD,
                log: ProvenanceLog | None = None,
                hyphens: frozenset[str] = DEFAULT_HYPHENS) -> list[str]:
    return [text for _, text in clean_pairs(_with_ids(lines, ids), latin_threshold, log, hyphens)]
