import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT / 'src'))

from lexicon_io import load_closed_class_tags, load_frequencies, load_lexicon  # noqa: E402

SEEDS = ROOT / 'seeds'

@pytest.fixture
def closed_tags():
    with open(SEEDS / 'closed_class.txt', encoding='utf-8') as f:
        return load_closed_class_tags(f)

@pytest.fixture
def lexicon(closed_tags):
    with open(SEEDS / 'fixture.lexicon.tsv', encoding='utf-8') as f:
        return load_lexicon(f, closed_tags)

@pytest.fixture
def freqs():
    with open(SEEDS / 'fixture.freq.tsv', encoding='utf-8') as f:
        return load_frequencies(f)

@pytest.fixture
def fixture_config():
    return SEEDS / 'fixture.yml'
