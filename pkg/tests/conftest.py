import pytest

from fillprobe.catalog import load


@pytest.fixture(scope="session")
def z2():
    return load("Z2")


@pytest.fixture(scope="session")
def z3():
    return load("Z3")


@pytest.fixture(scope="session")
def f2():
    return load("F2")


@pytest.fixture(scope="session")
def surface():
    return load("S2")
