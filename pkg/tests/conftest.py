import itertools

import pytest

from tmlab import corpus_machines, general_corpus_machines

TWO_SYMBOL = "ab"


def all_inputs(max_len=6, alphabet=TWO_SYMBOL):
    """Every string over ``alphabet`` up to ``max_len``, shortest first."""
    for length in range(max_len + 1):
        for tup in itertools.product(alphabet, repeat=length):
            yield "".join(tup)


def scale_for(w: str) -> int:
    return max(len(w), 2)


@pytest.fixture(scope="session")
def corpus():
    return corpus_machines()


@pytest.fixture(scope="session")
def general_corpus():
    return general_corpus_machines()
