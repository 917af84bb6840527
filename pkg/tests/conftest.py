import random
from pathlib import Path

import pytest

from muckit.formula import CnfFormula
from muckit.generators import random_kcnf
from muckit.oracle import brute_force_sat
from muckit.proof import ProofLog

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# variables a, b, c, d of the worked example are 1..4
FIG1_CLAUSES = [(1, 4, -2), (1, 4, 2), (1, 2, -4), (-3, 2), (-1, 3), (-1, -3), (-2,)]
FIG1_MUC = [1, 2, 4, 5, 6]
FIG1_OTHER_MUC = [1, 2, 3, 4, 6]


@pytest.fixture
def fig1() -> CnfFormula:
    return CnfFormula(4, tuple(FIG1_CLAUSES))


@pytest.fixture
def fig1_proof() -> ProofLog:
    return ProofLog.read(CORPUS / "fig1.proof")


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


def random_unsat_3cnf(rng: random.Random, lo: int = 10, hi: int = 20,
                      ratio=(4.5, 6.0)) -> CnfFormula:
    """Random 3-CNF, redrawn until the oracle finds it unsatisfiable."""
    while True:
        v = rng.randint(lo, hi)
        f = random_kcnf(v, round(v * rng.uniform(*ratio)), 3, rng)
        if brute_force_sat(f) is None:
            return f


# -- acceptance summary ----------------------------------------------------

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome == "failed":
        if report.when == "call" or name not in _acceptance:
            _acceptance[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in _acceptance.items():
        terminalreporter.write_line(f"{verdict}  {name}")
