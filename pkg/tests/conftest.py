"""Shared corpora for the acceptance gate, built once per session."""

import pytest

from qraclab import corpus


@pytest.fixture(scope="session")
def reference_codes():
    """Standard code, tensor powers k = 2..4, and 200 filtered random codes."""
    return corpus.reference_corpus(200, seed=0)


@pytest.fixture(scope="session")
def channel_corpus():
    return corpus.random_channels(200, seed=0)
