import pytest

from rmflab import build_tables


@pytest.fixture(scope="session")
def tables():
    # Shared across the whole run; large enough for every suite here.
    return build_tables(1_000_000)


@pytest.fixture(scope="session")
def tables_small():
    return build_tables(10_000)
