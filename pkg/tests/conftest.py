import numpy as np
import pytest

from netsdp.scenario import LevelSpec, Scenario

LINE = {
    "parties": [{"name": n, "inputs": 2, "outputs": [2, 2]} for n in "ABC"],
    "sources": [["A", "B"], ["B", "C"]],
    "mode": "quantum",
}

EFFICIENCY = {
    "parties": [
        {"name": "A", "inputs": 2, "outputs": [3, 3]},
        {"name": "B", "inputs": 1, "outputs": [4]},
        {"name": "C", "inputs": 2, "outputs": [3, 3]},
    ],
    "sources": [["A", "B"], ["B", "C"]],
    "mode": "classical",
}

BIQUANTUM_LEVEL = LevelSpec(3, presets=[{"a_words": {"party": "A", "min": 2, "max": 5}}])
BILOCAL_LEVEL = LevelSpec(3, scalar_symbols=["A:0 A:1"])
EFFICIENCY_LEVEL = LevelSpec(3, presets=[{"outcome_pairs": "C"}])

# acceptance-criterion summary lines, keyed by criterion number
RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])


@pytest.fixture
def line():
    return Scenario.from_dict(LINE)


@pytest.fixture
def line_classical():
    return Scenario.from_dict({**LINE, "mode": "classical"})


@pytest.fixture
def efficiency():
    return Scenario.from_dict(EFFICIENCY)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
