import importlib.util

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def backends():
    """Kernel backends available in this build."""
    names = ["python"]
    if importlib.util.find_spec("mirrordeco._ckernels") is not None:
        names.append("cython")
    return names
