from __future__ import annotations

import json
from importlib import resources

import numpy as np
import pytest

from jointsparse.solvers import MmvProblem, problem_from_json


def _packaged(name: str) -> MmvProblem:
    raw = resources.files("jointsparse.data").joinpath(f"{name}.json").read_text()
    return problem_from_json(json.loads(raw))


@pytest.fixture(scope="session")
def example1() -> MmvProblem:
    return _packaged("example1")


@pytest.fixture(scope="session")
def example2() -> MmvProblem:
    return _packaged("example2")


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
