import logging

import numpy as np
import pytest

from mfquant.lexicon import load_packaged_dictionary

logging.getLogger("mfquant").setLevel(logging.WARNING)


@pytest.fixture(scope="session")
def packaged_dict():
    return load_packaged_dictionary()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
