import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import funded_market  # noqa: E402


@pytest.fixture
def market():
    return funded_market()
