import pytest

from lecert import asymptotic


@pytest.fixture(scope="session")
def dec_case2():
    return asymptotic.derive_decomposition("case2")


@pytest.fixture(scope="session")
def dec_c04():
    return asymptotic.derive_decomposition("c04")
