from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def eight_classes_xml() -> Path:
    return DATA_DIR / "page_eight_classes.xml"


@pytest.fixture
def lexicon_tsv() -> Path:
    return DATA_DIR / "lexicon.tsv"
