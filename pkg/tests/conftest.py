import os

# The reference oracle needs more determinisation room than the CLI default
# for the fuzz corpora used below; set before anything reads the guard.
os.environ.setdefault("HDKIT_GUARD", "64")

import pytest

from helpers import build_a1, build_a2, build_a3


@pytest.fixture(scope="session")
def a1():
    return build_a1()


@pytest.fixture(scope="session")
def a2():
    return build_a2()


@pytest.fixture(scope="session")
def a3():
    return build_a3()
