import pathlib

import pytest

from tomsim.scenario import load_scenario

SCENARIOS = pathlib.Path(__file__).resolve().parents[1] / "src" / "tomsim" / "scenarios"


@pytest.fixture(scope="session")
def maryjohn_doc():
    return load_scenario(SCENARIOS / "maryjohn.tom")


@pytest.fixture(scope="session")
def interview_doc():
    return load_scenario(SCENARIOS / "interview.tom")
