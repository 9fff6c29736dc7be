from __future__ import annotations

from pathlib import Path

import pytest

from designgen.fonts import FontCatalog

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fonts() -> FontCatalog:
    return FontCatalog.bundled()


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def benchmark_path() -> Path:
    return FIXTURES / "benchmark_200.jsonl"


@pytest.fixture(scope="session")
def intentions_path() -> Path:
    return FIXTURES / "intentions_20.txt"
