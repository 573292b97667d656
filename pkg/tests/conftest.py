from importlib import resources
from pathlib import Path

import pytest

from heterotic5.connection import instanton_connection, levi_civita, with_torsion
from heterotic5.liealg import load_algebra
from heterotic5.ring import symbols
from heterotic5.su2 import HeteroticBackground, SU2Structure

DATA = Path(str(resources.files("heterotic5") / "data"))
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def n21_src():
    return load_algebra(DATA / "n21.alg")


@pytest.fixture(scope="session")
def n21(n21_src):
    return n21_src.to_algebra()


@pytest.fixture(scope="session")
def std(n21_src):
    return SU2Structure.from_source(n21_src.structure)


@pytest.fixture(scope="session")
def bg(n21, std):
    return HeteroticBackground(n21, std)


@pytest.fixture(scope="session")
def lc(n21):
    return levi_civita(n21)


@pytest.fixture(scope="session")
def plus(lc, bg):
    return with_torsion(lc, bg.flux, 1)


@pytest.fixture(scope="session")
def minus(lc, bg):
    return with_torsion(lc, bg.flux, -1)


@pytest.fixture(scope="session")
def lmt():
    return symbols("l m t")


@pytest.fixture(scope="session")
def inst(n21, lmt):
    return instanton_connection(n21, *lmt)


@pytest.fixture(scope="session")
def abc():
    return symbols("a b c")


@pytest.fixture(scope="session")
def r(abc):
    a, b, c = abc
    return a * a + b * b + c * c


@pytest.fixture(scope="session")
def s(lmt):
    l, m, t = lmt
    return l * l + m * m + t * t


@pytest.fixture(scope="session")
def deta(n21):
    return n21.d_coframe[4]


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_acceptance[" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid.split("[")[1].rstrip("]")] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for key, (desc, _) in CRITERIA.items():
        if key in _ACCEPTANCE:
            status = "PASS" if _ACCEPTANCE[key] == "passed" else "FAIL"
            terminalreporter.write_line(f"{key:<4} {status}  {desc}")
