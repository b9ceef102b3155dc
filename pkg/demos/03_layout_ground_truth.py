"""Layout ground truth: parsing pages, filtering zones, reading order.

Pages from two-column Greek/Latin editions carry eight semantic region
classes. Only the Greek column and titles feed the text pipeline; the rest
(Latin column, marginalia, page furniture) is filtered out.

Run: python3 demos/03_layout_ground_truth.py
"""

from pgforge import (
    Polygon,
    filter_relevant,
    linearize,
    page_to_dict,
    parse_page_xml,
    polygon_iou,
)

PAGE_XML = """<?xml version="1.0" encoding="UTF-8"?>
<PcGts>
  <Page imageFilename="vol003_p117.png" imageWidth="2000" imageHeight="3000">
    <TextRegion id="title" custom="structure {type:MainText_Title;}">
      <Coords points="300,200 1700,200 1700,320 300,320"/>
      <TextLine id="title_l0">
        <TextEquiv><Unicode>ΕΙΣ ΤΟ ΚΑΤΑ ΙΩΑΝΝΗΝ</Unicode></TextEquiv>
      </TextLine>
    </TextRegion>
    <TextRegion id="greek" custom="structure {type:MainText_ColGreek;}">
      <Coords points="120,400 980,400 980,2700 120,2700"/>
      <TextLine id="greek_l0">
        <TextEquiv><Unicode>Ἐν ἀρχῇ ἦν ὁ Λόγος,</Unicode></TextEquiv>
      </TextLine>
      <TextLine id="greek_l1">
        <TextEquiv><Unicode>καὶ ὁ Λόγος ἦν πρὸς τὸν Θεόν.</Unicode></TextEquiv>
      </TextLine>
    </TextRegion>
    <TextRegion id="latin" custom="structure {type:MainText_ColLatin;}">
      <Coords points="1020,400 1880,400 1880,2700 1020,2700"/>
      <TextLine id="latin_l0">
        <TextEquiv><Unicode>In principio erat Verbum,</Unicode></TextEquiv>
      </TextLine>
    </TextRegion>
    <TextRegion id="pagenum" custom="structure {type:Marginalia_PageNumber;}">
      <Coords points="1840,60 1950,60 1950,120 1840,120"/>
      <TextLine id="pagenum_l0">
        <TextEquiv><Unicode>117</Unicode></TextEquiv>
      </TextLine>
    </TextRegion>
  </Page>
</PcGts>
"""

page = parse_page_xml(PAGE_XML)
print(f"page {page.image_ref}: {page.width}x{page.height}, {len(page.regions)} regions")
for region in page.regions:
    print(f"  {region.id:9s} {region.region_class.value:28s} {len(region.lines)} lines")
print("reading order source:", page.report.reading_order_source)
print()

# Keep only the zones that carry the target text.
relevant = filter_relevant(page)
print("after filtering:", [r.id for r in relevant.regions])

# Linearize walks regions in reading order, lines in reading order, and
# keeps the line ids for traceability.
for line_id, text in linearize(relevant):
    print(f"  {line_id:9s} {text}")
print()

# Region shapes are real polygons; overlap uses true polygon clipping, not
# bounding boxes, because crossing column regions overlap in odd shapes.
greek_col = page.regions[1].polygon
latin_col = page.regions[2].polygon
print(f"greek/latin column IoU: {polygon_iou(greek_col, latin_col):.3f}")
wider = Polygon(((120, 400), (1400, 400), (1400, 2700), (120, 2700)))
print(f"greek column vs too-wide detection: {polygon_iou(greek_col, wider):.3f}")
print()

# The model mirrors to plain JSON for tooling on the prediction side.
mirror = page_to_dict(relevant)
print("JSON mirror keys:", sorted(mirror.keys()))
print("first region:", mirror["regions"][0]["id"], mirror["regions"][0]["class"])
