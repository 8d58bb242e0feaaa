import json
from pathlib import Path

import numpy as np
import pytest

from heavytail import _backend

ORACLE_FILE = Path(__file__).parent / "oracles" / "oracle_values.json"


def _available_backends():
    names = []
    for name in ("cython", "python"):
        try:
            _backend.load(name)
            names.append(name)
        except ImportError:
            pass
    return names


BACKENDS = _available_backends()


@pytest.fixture(scope="session")
def oracle():
    return json.loads(ORACLE_FILE.read_text())


@pytest.fixture(params=BACKENDS)
def kernel(request):
    return _backend.load(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
