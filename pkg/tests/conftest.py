import pytest

from divisum.formulas import default_table, theorem_specs


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def specs(table):
    return theorem_specs(table)
