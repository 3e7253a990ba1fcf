"""Shared fixtures: benchmark files and seeded streams."""

import random
from collections.abc import Callable
from pathlib import Path

import pytest

from app.modules.bench.parsers import load_instance
from app.modules.scheduling.model import Instance

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def ft06() -> Instance:
    return load_instance(DATA / "ft06.txt")


@pytest.fixture
def la01() -> Instance:
    return load_instance(DATA / "la01.txt")


@pytest.fixture
def toy() -> Instance:
    return load_instance(DATA / "toy_std.txt")


@pytest.fixture
def benchmark_instance() -> Callable[[str], Instance]:
    """Loader for benchmark files that are only present in a full data checkout."""

    def load(name: str) -> Instance:
        path = DATA / f"{name}.txt"
        if not path.is_file():
            pytest.skip(f"{path.name} is not in tests/data")
        return load_instance(path)

    return load


@pytest.fixture
def rng() -> random.Random:
    return random.Random(12345)
