import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pref2constraint.dataset import load_pilot_corpus


GOLDEN_DIR = Path(__file__).parent / "goldens"


@pytest.fixture(scope="session")
def pilot_records():
    return load_pilot_corpus()


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN_DIR
