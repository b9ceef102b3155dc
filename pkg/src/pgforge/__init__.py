"""pgforge: post-OCR toolkit for polytonic Greek corpora.

Covers the pipeline stages that follow text recognition: Unicode
canonicalization of duplicate Greek encodings, layout ground-truth
ingestion and filtering, OCR and layout evaluation, raw-text cleanup,
and emission of the five-layer vertical corpus format.
"""

__version__ = "0.1.0"

from .cleanup import (
    ProvenanceLog,
    clean_lines,
    clean_pairs,
    dehyphenate,
    drop_empty_lines,
    filter_latin,
)
from .greek import (
    CanonicalizationTable,
    DiacriticProfile,
    NotGreekLetter,
    canonicalize,
    decompose_profile,
    intuitive_form,
    is_greek_letter,
    is_latin_letter,
)
from .layout import (
    DegeneratePolygon,
    MalformedXml,
    MissingCoords,
    Page,
    Polygon,
    RegionClass,
    TextLine,
    TextRegion,
    UnknownRegionClass,
    filter_relevant,
    linearize,
    load_page,
    page_from_dict,
    page_to_dict,
    page_to_xml,
    parse_page_xml,
    polygon_iou,
    save_page_json,
)
from .layout_eval import (
    Detection,
    DetectionReport,
    MissingScores,
    average_precision_50,
    evaluate_layout,
    match_detections,
    mean_average_precision_50,
    reading_order_score,
)
from .ocr_eval import (
    Alignment,
    ConfusionMatrix,
    EmptyCorpus,
    EmptyReference,
    ErrorClass,
    EvalReport,
    align_chars,
    align_sequences,
    build_confusion,
    cer,
    classify_substitution,
    edit_distance,
    evaluate_corpus,
    wer,
    write_confusion_csv,
)
from .vert import (
    Lexicon,
    MalformedVert,
    Token,
    VertDocument,
    VertLine,
    VertPage,
    annotate,
    build_document,
    corpus_stats,
    emit_vert,
    parse_vert,
    parse_vert_many,
    tokenize,
    validate_vert,
    vert_string,
    write_stats_csv,
    write_vert,
)

__all__ = [
    "__version__",
    # greek
    "CanonicalizationTable",
    "DiacriticProfile",
    "NotGreekLetter",
    "canonicalize",
    "decompose_profile",
    "intuitive_form",
    "is_greek_letter",
    "is_latin_letter",
    # layout
    "DegeneratePolygon",
    "MalformedXml",
    "MissingCoords",
    "Page",
    "Polygon",
    "RegionClass",
    "TextLine",
    "TextRegion",
    "UnknownRegionClass",
    "filter_relevant",
    "linearize",
    "load_page",
    "page_from_dict",
    "page_to_dict",
    "page_to_xml",
    "parse_page_xml",
    "polygon_iou",
    "save_page_json",
    # ocr_eval
    "Alignment",
    "ConfusionMatrix",
    "EmptyCorpus",
    "EmptyReference",
    "ErrorClass",
    "EvalReport",
    "align_chars",
    "align_sequences",
    "build_confusion",
    "cer",
    "classify_substitution",
    "edit_distance",
    "evaluate_corpus",
    "wer",
    "write_confusion_csv",
    # layout_eval
    "Detection",
    "DetectionReport",
    "MissingScores",
    "average_precision_50",
    "evaluate_layout",
    "match_detections",
    "mean_average_precision_50",
    "reading_order_score",
    # cleanup
    "ProvenanceLog",
    "clean_lines",
    "clean_pairs",
    "dehyphenate",
    "drop_empty_lines",
    "filter_latin",
    # vert
    "Lexicon",
    "MalformedVert",
    "Token",
    "VertDocument",
    "VertLine",
    "VertPage",
    "annotate",
    "build_document",
    "corpus_stats",
    "emit_vert",
    "parse_vert",
    "parse_vert_many",
    "tokenize",
    "validate_vert",
    "vert_string",
    "write_stats_csv",
    "write_vert",
]
