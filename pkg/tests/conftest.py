import pytest

from kxstit.gen import model_grid
from kxstit.model import KripkeModel
from kxstit.scenario import bdt_to_kripke, figure1_scenario

ACCEPTANCE_LINES = []


def record_acceptance(number, ok, detail):
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fig1a():
    return bdt_to_kripke(figure1_scenario("a"))


@pytest.fixture(scope="session")
def fig1b():
    return bdt_to_kripke(figure1_scenario("b"))


@pytest.fixture(scope="session")
def grid200():
    return model_grid(200, base_seed=1000)


@pytest.fixture(scope="session")
def grid50():
    return model_grid(50, base_seed=5000)


@pytest.fixture
def one_world():
    return KripkeModel(["a"], ["w"], [["w"]], {"w": "w"}, {"a": [["w"]]},
                       {"a": [["w"]]}, valuation={"p": ["w"]})


@pytest.fixture
def super_additive_fixture():
    """Two agents, one settledness class on a 2-cycle; both agents hold the
    trivial cell while the coalition partition splits it: one profile with
    two coalition cells."""
    return KripkeModel(
        ["a0", "a1"], ["a", "b"], [["a", "b"]], {"a": "b", "b": "a"},
        {"a0": [["a", "b"]], "a1": [["a", "b"]]},
        {"a0": [["a"], ["b"]], "a1": [["a", "b"]]},
        choice_ags=[["a"], ["b"]], valuation={"p": ["a"]})
