import random

import pytest

from grig.words import parse
from grig import quotient as qt


def random_word(rng: random.Random, max_len: int):
    return parse("".join(rng.choice("abcd") for _ in range(rng.randint(0, max_len))))


@pytest.fixture(scope="session")
def q3():
    return qt.enumerate_quotient(3)


@pytest.fixture(scope="session")
def q4():
    return qt.enumerate_quotient(4)


@pytest.fixture(scope="session")
def q5():
    # ~90 s to build; shared by every depth-5 brute oracle in the session
    return qt.enumerate_quotient(5)
