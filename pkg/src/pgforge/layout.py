"""Page layout ground truth: semantic regions, line polygons, reading order.

Parses the PAGE-style XML subset used by layout annotation tools (regions
carry their semantic class in the ``custom`` attribute) plus a JSON mirror
of the same model for downstream tooling. The relevance filter keeps only
the zones that feed the Greek text pipeline: Greek columns and titles.
"""

from __future__ import annotations

import json
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO

from shapely.errors import GEOSException
from shapely.geometry import Polygon as _ShapelyPolygon
from shapely.validation import make_valid


class MalformedXml(ValueError):
    """Raised when a page file cannot be parsed at all."""


class UnknownRegionClass(ValueError):
    """Raised when a region carries a label outside the known class set."""

    def __init__(self, label: str):
        super().__init__(f"unknown region class label: {label!r}")
        self.label = label


class MissingCoords(ValueError):
    """Raised when a region lacks usable polygon coordinates."""


class DegeneratePolygon(ValueError):
    """Raised when an IoU is requested for a zero-area polygon."""


class RegionClass(Enum):
    MAIN_TEXT_COL_GREEK = "MainText_ColGreek"
    MAIN_TEXT_COL_LATIN = "MainText_ColLatin"
    MAIN_TEXT_TITLE = "MainText_Title"
    MARGINALIA = "Marginalia"
    MARGINALIA_FOOTNOTE = "Marginalia_Footnote"
    MARGINALIA_PAGE_NUMBER = "Marginalia_PageNumber"
    MARGINALIA_PARAGRAPH_NUMBER = "Marginalia_ParagraphNumber"
    TITLE_RUNNING_TITLE = "Title_RunningTitle"


# Annotation exports abbreviate the running-title class in some tables.
_CLASS_ALIASES = {"Running": RegionClass.TITLE_RUNNING_TITLE}

RELEVANT_CLASSES = frozenset({RegionClass.MAIN_TEXT_COL_GREEK, RegionClass.MAIN_TEXT_TITLE})


def parse_region_class(label: str) -> RegionClass:
    try:
        return RegionClass(label)
    except ValueError:
        if label in _CLASS_ALIASES:
            return _CLASS_ALIASES[label]
        raise UnknownRegionClass(label) from None


@dataclass(frozen=True)
class Polygon:
    """Closed polygon in pixel coordinates, at least three finite vertices."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError(f"polygon needs at least 3 vertices, got {len(self.vertices)}")
        if any(not (math.isfinite(x) and math.isfinite(y)) for x, y in self.vertices):
            raise ValueError("polygon coordinates must be finite")

    @property
    def area(self) -> float:
        """Shoelace area, orientation-normalized to be non-negative."""
        total = 0.0
        pts = self.vertices
        for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
            total += x1 * y2 - x2 * y1
        return abs(total) / 2.0

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [x for x, _ in self.vertices]
        ys = [y for _, y in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


def _as_shapely(poly: Polygon):
    shape = _ShapelyPolygon(poly.vertices)
    if not shape.is_valid:
        # ground truth occasionally self-intersects; repair keeps the area
        shape = make_valid(shape)
    return shape


def polygon_iou(a: Polygon, b: Polygon) -> float:
    """Intersection-over-union of two arbitrary simple polygons.

    Real clipping, not a bounding-box approximation: crossing column
    regions overlap in ways boxes misstate badly.

    Raises:
        DegeneratePolygon: either polygon has zero area.
    """
    if a.area == 0.0 or b.area == 0.0:
        raise DegeneratePolygon("cannot compute IoU of a zero-area polygon")
    sa, sb = _as_shapely(a), _as_shapely(b)
    try:
        inter = sa.intersection(sb).area
    except GEOSException as exc:  # pragma: no cover - shapely internal failure
        raise DegeneratePolygon(str(exc)) from exc
    union = sa.area + sb.area - inter
    if union <= 0.0:
        raise DegeneratePolygon("union of polygons has zero area")
    return inter / union


@dataclass(frozen=True)
class TextLine:
    id: str
    text: str = ""
    polygon: Polygon | None = None
    reading_index: int = 0


@dataclass(frozen=True)
class TextRegion:
    id: str
    region_class: RegionClass
    polygon: Polygon
    lines: tuple[TextLine, ...] = ()
    reading_index: int = 0
    score: float | None = None  # set on model predictions only

    def __post_init__(self):
        indices = sorted(line.reading_index for line in self.lines)
        if indices != list(range(len(self.lines))):
            raise ValueError(
                f"region {self.id!r}: line reading indices must be 0..{len(self.lines) - 1}"
            )


@dataclass(frozen=True)
class ParseReport:
    reading_order_source: str
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Page:
    image_ref: str
    width: int
    height: int
    regions: tuple[TextRegion, ...] = ()
    report: ParseReport | None = field(default=None, compare=False)


def filter_relevant(page: Page) -> Page:
    """Keep only Greek-column and title regions, order and content untouched."""
    kept = tuple(r for r in page.regions if r.region_class in RELEVANT_CLASSES)
    return Page(page.image_ref, page.width, page.height, kept, page.report)


def linearize(page: Page) -> list[tuple[str, str]]:
    """(line_id, text) pairs in reading order: regions by index, lines by index."""
    out: list[tuple[str, str]] = []
    for region in sorted(page.regions, key=lambda r: r.reading_index):
        for line in sorted(region.lines, key=lambda l: l.reading_index):
            out.append((line.id, line.text))
    return out


_POINT_RE = re.compile(r"^\s*(-?[\d.]+),(-?[\d.]+)\s*$")


def _parse_points(points: str) -> Polygon:
    vertices = []
    for token in points.split():
        m = _POINT_RE.match(token)
        if not m:
            raise MissingCoords(f"bad point token {token!r}")
        vertices.append((float(m.group(1)), float(m.group(2))))
    if len(vertices) < 3:
        raise MissingCoords(f"need at least 3 points, got {len(vertices)}")
    return Polygon(tuple(vertices))


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find_child(elem, name: str):
    for child in elem:
        if _localname(child.tag) == name:
            return child
    return None


def _find_children(elem, name: str):
    return [child for child in elem if _localname(child.tag) == name]


_STRUCTURE_TYPE_RE = re.compile(r"structure\s*\{[^}]*?type\s*:\s*([^;}]+)")


def _region_label(elem) -> str:
    custom = elem.get("custom", "")
    m = _STRUCTURE_TYPE_RE.search(custom)
    if m:
        return m.group(1).strip()
    return elem.get("type", "")


def _check_bounds(poly: Polygon, width: int, height: int, owner: str, warnings: list[str]) -> None:
    for x, y in poly.vertices:
        if not (0 <= x <= width and 0 <= y <= height):
            warnings.append(
                f"{owner}: point ({x:g}, {y:g}) outside page bounds {width}x{height}"
            )
            return


def parse_page_xml(source: str | Path | IO) -> Page:
    """Parse the PAGE-style XML subset into a :class:`Page`.

    Region reading order comes from an explicit ReadingOrder element when
    present, otherwise from document order; the parse report records which.

    Raises:
        MalformedXml, UnknownRegionClass, MissingCoords
    """
    try:
        if isinstance(source, str) and source.lstrip().startswith("<"):
            root = ET.fromstring(source)
        else:
            root = ET.parse(source).getroot()
    except ET.ParseError as exc:
        raise MalformedXml(f"not well-formed XML: {exc}") from exc

    page_elem = root if _localname(root.tag) == "Page" else None
    if page_elem is None:
        for elem in root.iter():
            if _localname(elem.tag) == "Page":
                page_elem = elem
                break
    if page_elem is None:
        raise MalformedXml("no Page element found")

    warnings: list[str] = []
    image_ref = page_elem.get("imageFilename", "")
    try:
        width = int(page_elem.get("imageWidth", "0"))
        height = int(page_elem.get("imageHeight", "0"))
    except ValueError as exc:
        raise MalformedXml(f"bad page dimensions: {exc}") from exc

    explicit_order: dict[str, int] = {}
    for elem in page_elem.iter():
        if _localname(elem.tag) == "RegionRefIndexed":
            ref = elem.get("regionRef", "")
            try:
                explicit_order[ref] = int(elem.get("index", ""))
            except ValueError as exc:
                raise MalformedXml(f"bad ReadingOrder index for {ref!r}") from exc

    regions: list[TextRegion] = []
    position = 0
    for region_elem in _find_children(page_elem, "TextRegion"):
        region_id = region_elem.get("id", f"region_{position}")
        region_class = parse_region_class(_region_label(region_elem))
        coords = _find_child(region_elem, "Coords")
        if coords is None or not coords.get("points"):
            raise MissingCoords(f"region {region_id!r} has no Coords")
        polygon = _parse_points(coords.get("points"))
        _check_bounds(polygon, width, height, f"region {region_id}", warnings)

        lines: list[TextLine] = []
        for line_index, line_elem in enumerate(_find_children(region_elem, "TextLine")):
            line_id = line_elem.get("id", f"{region_id}_l{line_index}")
            line_poly = None
            line_coords = _find_child(line_elem, "Coords")
            if line_coords is not None and line_coords.get("points"):
                line_poly = _parse_points(line_coords.get("points"))
                _check_bounds(line_poly, width, height, f"line {line_id}", warnings)
            text = ""
            equiv = _find_child(line_elem, "TextEquiv")
            if equiv is not None:
                unicode_elem = _find_child(equiv, "Unicode")
                if unicode_elem is not None and unicode_elem.text:
                    text = unicode_elem.text
            lines.append(TextLine(id=line_id, text=text, polygon=line_poly, reading_index=line_index))

        reading_index = explicit_order.get(region_id, position)
        regions.append(
            TextRegion(
                id=region_id,
                region_class=region_class,
                polygon=polygon,
                lines=tuple(lines),
                reading_index=reading_index,
            )
        )
        position += 1

    source_kind = "explicit" if explicit_order else "document-order"
    report = ParseReport(reading_order_source=source_kind, warnings=tuple(warnings))
    return Page(image_ref, width, height, tuple(regions), report)


def page_to_xml(page: Page) -> str:
    """Serialize back to the PAGE-style subset; regions in reading order."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        "<PcGts>",
        f'  <Page imageFilename="{page.image_ref}" imageWidth="{page.width}" imageHeight="{page.height}">',
    ]
    for region in sorted(page.regions, key=lambda r: r.reading_index):
        lines.append(
            f'    <TextRegion id="{region.id}" custom="structure '
            f'{{type:{region.region_class.value};}}">'
        )
        lines.append(f'      <Coords points="{_format_points(region.polygon)}"/>')
        for line in sorted(region.lines, key=lambda l: l.reading_index):
            lines.append(f'      <TextLine id="{line.id}">')
            if line.polygon is not None:
                lines.append(f'        <Coords points="{_format_points(line.polygon)}"/>')
            lines.append(
                f"        <TextEquiv><Unicode>{_xml_escape(line.text)}</Unicode></TextEquiv>"
            )
            lines.append("      </TextLine>")
        lines.append("    </TextRegion>")
    lines.append("  </Page>")
    lines.append("</PcGts>")
    return "\n".join(lines) + "\n"


def _format_number(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(value)


def _format_points(poly: Polygon) -> str:
    return " ".join(f"{_format_number(x)},{_format_number(y)}" for x, y in poly.vertices)


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def page_to_dict(page: Page) -> dict:
    """JSON mirror of the page model."""
    return {
        "image_ref": page.image_ref,
        "width": page.width,
        "height": page.height,
        "regions": [
            {
                "id": r.id,
                "class": r.region_class.value,
                "reading_index": r.reading_index,
                "polygon": [list(pt) for pt in r.polygon.vertices],
                **({"score": r.score} if r.score is not None else {}),
                "lines": [
                    {
                        "id": l.id,
                        "reading_index": l.reading_index,
                        "text": l.text,
                        "polygon": [list(pt) for pt in l.polygon.vertices] if l.polygon else None,
                    }
                    for l in r.lines
                ],
            }
            for r in page.regions
        ],
    }


def page_from_dict(data: dict) -> Page:
    """Parse the JSON mirror; stored reading indices are kept as given."""
    try:
        regions = []
        for rd in data.get("regions", []):
            lines = tuple(
                TextLine(
                    id=ld["id"],
                    text=ld.get("text", ""),
                    polygon=Polygon(tuple(map(tuple, ld["polygon"]))) if ld.get("polygon") else None,
                    reading_index=int(ld.get("reading_index", i)),
                )
                for i, ld in enumerate(rd.get("lines", []))
            )
            regions.append(
                TextRegion(
                    id=rd["id"],
                    region_class=parse_region_class(rd["class"]),
                    polygon=Polygon(tuple(map(tuple, rd["polygon"]))),
                    lines=lines,
                    reading_index=int(rd.get("reading_index", len(regions))),
                    score=rd.get("score"),
                )
            )
        return Page(
            image_ref=data.get("image_ref", ""),
            width=int(data.get("width", 0)),
            height=int(data.get("height", 0)),
            regions=tuple(regions),
            report=ParseReport(reading_order_source="stored-indices"),
        )
    except UnknownRegionClass:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedXml(f"bad page JSON: {exc}") from exc


def load_page(path: str | Path) -> Page:
    """Load a page from .xml (PAGE subset) or .json (mirror) by extension."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedXml(f"{path}: bad JSON: {exc}") from exc
        return page_from_dict(data)
    return parse_page_xml(path)


def save_page_json(page: Page, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(page_to_dict(page), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
