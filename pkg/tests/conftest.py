import pytest

from radpi import PrecisionContext


@pytest.fixture(scope="session")
def ctx128() -> PrecisionContext:
    return PrecisionContext(128)


@pytest.fixture(scope="session")
def ctx256() -> PrecisionContext:
    return PrecisionContext(256)
