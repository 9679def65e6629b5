import pytest

from ambp import build_amortized, named_function


@pytest.fixture(scope="session")
def xor1():
    return build_amortized(named_function("xor", 1))


@pytest.fixture(scope="session")
def xor2():
    return build_amortized(named_function("xor", 2))


@pytest.fixture(scope="session")
def maj3():
    return build_amortized(named_function("maj", 3))
