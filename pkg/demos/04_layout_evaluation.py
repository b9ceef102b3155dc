"""Evaluating layout predictions: per-class P/R, AP at IoU 0.5, reading order.

Run: python3 demos/04_layout_evaluation.py
"""

from pgforge import (
    Detection,
    Polygon,
    RegionClass,
    TextRegion,
    average_precision_50,
    match_detections,
    mean_average_precision_50,
    reading_order_score,
)

GREEK = RegionClass.MAIN_TEXT_COL_GREEK
TITLE = RegionClass.MAIN_TEXT_TITLE


def square(x0, y0, side):
    return Polygon(((x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)))


ground_truth = [
    TextRegion(id="g1", region_class=GREEK, polygon=square(0, 0, 100)),
    TextRegion(id="g2", region_class=GREEK, polygon=square(150, 0, 100)),
    TextRegion(id="t1", region_class=TITLE, polygon=square(0, 150, 80)),
]

# Three Greek detections: one exact, one shifted but above the IoU
# threshold, one spurious; the title is missed entirely.
predictions = [
    Detection(GREEK, square(0, 0, 100), score=0.98),
    Detection(GREEK, square(155, 0, 100), score=0.91),
    Detection(GREEK, square(400, 400, 100), score=0.40),
]

result = match_detections(ground_truth, predictions, iou_threshold=0.5)
for cls, stats in sorted(result.per_class.items(), key=lambda kv: kv[0].value):
    print(
        f"{cls.value:22s} TP={stats.tp} FP={stats.fp} FN={stats.fn} "
        f"P={stats.precision:.3f} R={stats.recall:.3f}"
    )
print("matches (gt_index, pred_index, IoU):",
      [(g, p, round(i, 3)) for g, p, i in result.matches])
print()

# AP sweeps the confidence threshold and integrates the PR curve with
# all-points interpolation; mAP averages over classes present in the GT.
aps = average_precision_50(ground_truth, predictions)
for cls, ap in sorted(aps.items(), key=lambda kv: kv[0].value):
    print(f"AP50 {cls.value:22s} {ap:.3f}")
print(f"mAP50: {mean_average_precision_50(ground_truth, predictions):.3f}")
print()

# Reading order: fraction of line-id pairs kept in the right order. The
# typical failure is a split line whose fragments come back reversed.
gt_order = ["l1", "l2", "l3", "l4"]
print("identical:", reading_order_score(gt_order, ["l1", "l2", "l3", "l4"]))
print("adjacent swap:", round(reading_order_score(gt_order, ["l1", "l3", "l2", "l4"]), 4))
print("reversed:", reading_order_score(gt_order, ["l4", "l3", "l2", "l1"]))
