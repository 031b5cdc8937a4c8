import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"

sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def bio_corpus(fixtures_dir) -> Path:
    return fixtures_dir / "corpus_bio_ar.jsonl"
