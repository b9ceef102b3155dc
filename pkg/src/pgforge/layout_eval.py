"""Evaluation of predicted layout against ground truth.

Per-class precision/recall and AP at IoU 0.5 for regions, the same
precision/recall machinery for text lines, and a pairwise reading-order
score. Matching is greedy in descending confidence, each ground-truth
shape claimed at most once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .layout import Page, Polygon, RegionClass, TextRegion, linearize, polygon_iou


class MissingScores(ValueError):
    """Raised when average precision is requested without confidence scores."""


@dataclass(frozen=True)
class Detection:
    """One predicted region: class, polygon, optional confidence."""

    region_class: RegionClass
    polygon: Polygon
    score: float | None = None


def detections_from_page(page: Page) -> list[Detection]:
    return [Detection(r.region_class, r.polygon, r.score) for r in page.regions]


@dataclass
class ClassMatchStats:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    precision_defined: bool = True

    @property
    def precision(self) -> float:
        if self.tp + self.fp == 0:
            return 0.0
        return self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> float:
        if self.tp + self.fn == 0:
            return 0.0
        return self.tp / (self.tp + self.fn)


@dataclass
class MatchResult:
    per_class: dict[RegionClass, ClassMatchStats]
    matches: list[tuple[int, int, float]]  # (gt_index, pred_index, iou)


def _sorted_pred_indices(preds: Sequence, ious: list[list[float]]) -> list[int]:
    # confidence descending; ties by best available IoU, then input order
    def key(p: int):
        best = max(ious[p]) if ious[p] else 0.0
        score = preds[p].score if preds[p].score is not None else 1.0
        return (-score, -best, p)

    return sorted(range(len(preds)), key=key)


def _greedy_match(
    gt_polys: Sequence[Polygon], preds: Sequence, iou_threshold: float
) -> tuple[list[tuple[int, int, float]], list[bool], list[int]]:
    """Match predictions to ground truth, best IoU first within score order.

    Returns the matches, a per-prediction true-positive flag in the
    *score-sorted* prediction order used for AP curves, and that order.
    """
    ious = [[polygon_iou(p.polygon, g) for g in gt_polys] for p in preds]
    order = _sorted_pred_indices(preds, ious)
    taken = [False] * len(gt_polys)
    matches: list[tuple[int, int, float]] = []
    tp_flags: list[bool] = []
    for p in order:
        best_iou = 0.0
        best_g = -1
        for g, iou in enumerate(ious[p]):
            if not taken[g] and iou > best_iou:
                best_iou, best_g = iou, g
        if best_g >= 0 and best_iou >= iou_threshold:
            taken[best_g] = True
            matches.append((best_g, p, best_iou))
            tp_flags.append(True)
        else:
            tp_flags.append(False)
    return matches, tp_flags, order


def match_detections(
    gt: Sequence[TextRegion],
    pred: Sequence[Detection],
    iou_threshold: float = 0.5,
) -> MatchResult:
    """Greedy per-class matching with precision/recall per class.

    A prediction may only match ground truth of its own class, at IoU at or
    above the threshold. Classes with no predictions report an undefined
    precision as 0.0 with ``precision_defined=False``.
    """
    if not (0.0 < iou_threshold <= 1.0):
        raise ValueError(f"iou_threshold must be in (0, 1], got {iou_threshold}")
    classes = {r.region_class for r in gt} | {d.region_class for d in pred}
    per_class: dict[RegionClass, ClassMatchStats] = {}
    matches: list[tuple[int, int, float]] = []
    for cls in classes:
        gt_idx = [i for i, r in enumerate(gt) if r.region_class is cls]
        pred_idx = [i for i, d in enumerate(pred) if d.region_class is cls]
        cls_matches, tp_flags, _ = _greedy_match(
            [gt[i].polygon for i in gt_idx], [pred[i] for i in pred_idx], iou_threshold
        )
        tp = sum(tp_flags)
        per_class[cls] = ClassMatchStats(
            tp=tp,
            fp=len(pred_idx) - tp,
            fn=len(gt_idx) - tp,
            precision_defined=bool(pred_idx),
        )
        for g_local, p_local, iou in cls_matches:
            matches.append((gt_idx[g_local], pred_idx[p_local], iou))
    matches.sort()
    return MatchResult(per_class=per_class, matches=matches)


def _ap_from_flags(tp_flags: Sequence[bool], n_gt: int) -> float:
    """All-points interpolated AP from score-ordered true-positive flags."""
    if n_gt == 0:
        return 0.0
    if not tp_flags:
        return 0.0
    tp_cum = 0
    precisions: list[float] = []
    recalls: list[float] = []
    for k, flag in enumerate(tp_flags, start=1):
        tp_cum += flag
        precisions.append(tp_cum / k)
        recalls.append(tp_cum / n_gt)
    # interpolate: precision at recall r is the max precision at recall >= r
    for i in range(len(precisions) - 2, -1, -1):
        precisions[i] = max(precisions[i], precisions[i + 1])
    ap = 0.0
    prev_recall = 0.0
    for precision, recall in zip(precisions, recalls):
        if recall > prev_recall:
            ap += (recall - prev_recall) * precision
            prev_recall = recall
    return ap


def average_precision_50(
    gt: Sequence[TextRegion],
    pred: Sequence[Detection],
    iou_threshold: float = 0.5,
) -> dict[RegionClass, float]:
    """AP per class present in the ground truth, at the given IoU threshold.

    Raises:
        MissingScores: any prediction lacks a confidence score.
    """
    if any(d.score is None for d in pred):
        raise MissingScores("every prediction needs a score for average precision")
    aps: dict[RegionClass, float] = {}
    for cls in {r.region_class for r in gt}:
        gt_polys = [r.polygon for r in gt if r.region_class is cls]
        cls_preds = [d for d in pred if d.region_class is cls]
        _, tp_flags, _ = _greedy_match(gt_polys, cls_preds, iou_threshold)
        aps[cls] = _ap_from_flags(tp_flags, len(gt_polys))
    return aps


def mean_average_precision_50(
    gt: Sequence[TextRegion], pred: Sequence[Detection], iou_threshold: float = 0.5
) -> float:
    aps = average_precision_50(gt, pred, iou_threshold)
    if not aps:
        return 0.0
    return sum(aps.values()) / len(aps)


def _count_inversions(seq: list[int]) -> int:
    """Inversion count by merge sort."""
    if len(seq) < 2:
        return 0
    mid = len(seq) // 2
    left, right = seq[:mid], seq[mid:]
    inv = _count_inversions(left) + _count_inversions(right)
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            inv += len(left) - i
            merged.append(right[j])
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    seq[:] = merged
    return inv


def reading_order_score(
    gt_order: Sequence[str], pred_order: Sequence[str]
) -> float:
    """Fraction of ordered line-id pairs the prediction keeps in order.

    Ids present on only one side are dropped before scoring. One adjacent
    swap among n lines costs 1/C(n,2); a fully reversed order scores 0.
    Fewer than two shared ids score 1.0 (nothing to get wrong).
    """
    concordant, total = _order_pair_counts(gt_order, pred_order)
    if total == 0:
        return 1.0
    return concordant / total


def _order_pair_counts(
    gt_order: Sequence[str], pred_order: Sequence[str]
) -> tuple[int, int]:
    common = set(gt_order) & set(pred_order)
    gt_seq = [x for x in gt_order if x in common]
    pred_seq = [x for x in pred_order if x in common]
    if len(set(gt_seq)) != len(gt_seq) or len(set(pred_seq)) != len(pred_seq):
        raise ValueError("line ids must be unique within an ordering")
    n = len(gt_seq)
    if n < 2:
        return 0, 0
    rank = {line_id: k for k, line_id in enumerate(gt_seq)}
    inversions = _count_inversions([rank[x] for x in pred_seq])
    total = n * (n - 1) // 2
    return total - inversions, total


@dataclass
class ClassReport:
    precision: float
    recall: float
    ap50: float
    n_gt: int
    precision_defined: bool = True


@dataclass
class DetectionReport:
    """Corpus-level layout scores: per-class region detection, line detection, order."""

    per_class: dict[RegionClass, ClassReport]
    map50: float
    line_precision: float
    line_recall: float
    reading_order: float
    dropped_line_ids: int = 0

    def to_json_dict(self) -> dict:
        return {
            "per_class": {
                cls.value: {
                    "precision": rep.precision,
                    "recall": rep.recall,
                    "ap50": rep.ap50,
                    "n_gt": rep.n_gt,
                    "precision_defined": rep.precision_defined,
                }
                for cls, rep in sorted(self.per_class.items(), key=lambda kv: kv[0].value)
            },
            "map50": self.map50,
            "line_precision": self.line_precision,
            "line_recall": self.line_recall,
            "reading_order": self.reading_order,
            "dropped_line_ids": self.dropped_line_ids,
        }


@dataclass(frozen=True)
class _LineShape:
    polygon: Polygon
    score: float | None = None


def evaluate_layout(
    page_pairs: Sequence[tuple[Page, Page]], iou_threshold: float = 0.5
) -> DetectionReport:
    """Score (ground_truth, prediction) page pairs, pooled across pages.

    Region matching is per page and per class; the precision/recall curve
    for AP pools the score-ordered decisions from every page. Line
    detection reuses the same matcher, class-blind, on line polygons.
    Reading order compares linearized line ids page by page and pools the
    pair counts.
    """
    per_class_flags: dict[RegionClass, list[tuple[float, bool]]] = {}
    per_class_counts: dict[RegionClass, dict[str, int]] = {}
    line_tp = line_fp = line_fn = 0
    concordant_total = pair_total = 0
    dropped = 0

    for gt_page, pred_page in page_pairs:
        gt_regions = list(gt_page.regions)
        detections = detections_from_page(pred_page)
        for cls in {r.region_class for r in gt_regions} | {d.region_class for d in detections}:
            gt_polys = [r.polygon for r in gt_regions if r.region_class is cls]
            cls_preds = [d for d in detections if d.region_class is cls]
            _, tp_flags, order = _greedy_match(gt_polys, cls_preds, iou_threshold)
            tp = sum(tp_flags)
            counts = per_class_counts.setdefault(cls, {"tp": 0, "fp": 0, "fn": 0, "n_pred": 0})
            counts["tp"] += tp
            counts["fp"] += len(cls_preds) - tp
            counts["fn"] += len(gt_polys) - tp
            counts["n_pred"] += len(cls_preds)
            scores = [
                cls_preds[i].score if cls_preds[i].score is not None else 1.0 for i in order
            ]
            per_class_flags.setdefault(cls, []).extend(zip(scores, tp_flags))

        gt_lines = [
            _LineShape(line.polygon)
            for region in gt_page.regions
            for line in region.lines
            if line.polygon is not None
        ]
        pred_lines = [
            _LineShape(line.polygon, region.score)
            for region in pred_page.regions
            for line in region.lines
            if line.polygon is not None
        ]
        _, l_flags, _ = _greedy_match([l.polygon for l in gt_lines], pred_lines, iou_threshold)
        tp = sum(l_flags)
        line_tp += tp
        line_fp += len(pred_lines) - tp
        line_fn += len(gt_lines) - tp

        gt_ids = [lid for lid, _ in linearize(gt_page)]
        pred_ids = [lid for lid, _ in linearize(pred_page)]
        dropped += len(set(gt_ids) ^ set(pred_ids))
        concordant, total = _order_pair_counts(gt_ids, pred_ids)
        concordant_total += concordant
        pair_total += total

    per_class: dict[RegionClass, ClassReport] = {}
    gt_classes = []
    for cls, counts in per_class_counts.items():
        n_gt = counts["tp"] + counts["fn"]
        flags = sorted(per_class_flags.get(cls, []), key=lambda sf: -sf[0])
        ap = _ap_from_flags([f for _, f in flags], n_gt)
        denom_p = counts["tp"] + counts["fp"]
        per_class[cls] = ClassReport(
            precision=counts["tp"] / denom_p if denom_p else 0.0,
            recall=counts["tp"] / n_gt if n_gt else 0.0,
            ap50=ap,
            n_gt=n_gt,
            precision_defined=bool(counts["n_pred"]),
        )
        if n_gt:
            gt_classes.append(cls)

    map50 = (
        sum(per_class[c].ap50 for c in gt_classes) / len(gt_classes) if gt_classes else 0.0
    )
    return DetectionReport(
        per_class=per_class,
        map50=map50,
        line_precision=line_tp / (line_tp + line_fp) if line_tp + line_fp else 0.0,
        line_recall=line_tp / (line_tp + line_fn) if line_tp + line_fn else 0.0,
        reading_order=concordant_total / pair_total if pair_total else 1.0,
        dropped_line_ids=dropped,
    )


def write_class_table_csv(report: DetectionReport, path: str | Path) -> None:
    """Per-class table plus line-detection and reading-order summary rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class", "precision", "recall", "ap50"])
        for cls, rep in sorted(report.per_class.items(), key=lambda kv: kv[0].value):
            writer.writerow([cls.value, f"{rep.precision:.3f}", f"{rep.recall:.3f}", f"{rep.ap50:.3f}"])
        writer.writerow(["Line detection", f"{report.line_precision:.3f}", f"{report.line_recall:.3f}", ""])
        writer.writerow(["Reading order", f"{report.reading_order:.2f}", "", ""])
