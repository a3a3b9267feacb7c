from pathlib import Path

import pytest

from repcause import parse_problem

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def read_fixture(name: str) -> str:
    return fixture_path(name).read_text()


@pytest.fixture
def load():
    """Parse a problem fixture by file name."""

    def _load(name: str):
        return parse_problem(read_fixture(name))

    return _load
