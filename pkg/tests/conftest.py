import json
from importlib import resources

import pytest

from quadiff.differential import differential_from_record
from quadiff.strips import decompose


def load_benchmark(name):
    text = resources.files("quadiff").joinpath("data", f"{name}.json").read_text()
    return differential_from_record(json.loads(text))


@pytest.fixture(scope="session")
def bench4():
    return load_benchmark("benchmark4")


@pytest.fixture(scope="session")
def bench3():
    return load_benchmark("benchmark3")


@pytest.fixture(scope="session")
def folded4():
    return load_benchmark("folded4")


@pytest.fixture(scope="session")
def dec4(bench4):
    return decompose(bench4)


@pytest.fixture(scope="session")
def dec3(bench3):
    return decompose(bench3)


@pytest.fixture(scope="session")
def dec_folded(folded4):
    return decompose(folded4)
