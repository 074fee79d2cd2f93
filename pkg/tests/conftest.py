import mpmath as mp
import pytest

import salemflow as sf

EXAMPLE_IMAGES = ["12", "14", "2", "3"]
EXAMPLE_MIN_POLY = (1, -1, -1, -1, 1)


@pytest.fixture(scope="session")
def example_sub():
    return sf.Substitution.from_strings(EXAMPLE_IMAGES)


@pytest.fixture(scope="session")
def example_matrix(example_sub):
    return sf.build_matrix(example_sub)


@pytest.fixture(scope="session")
def example_perron(example_matrix):
    return sf.perron_data(example_matrix)


@pytest.fixture(scope="session")
def example_field():
    return sf.NumberField(EXAMPLE_MIN_POLY)


@pytest.fixture(scope="session")
def example_salem(example_field):
    return sf.SalemNumber(example_field)


@pytest.fixture(scope="session")
def golden_field():
    return sf.NumberField((-1, -1, 1))


def mpf_close(a, b, tol):
    return abs(mp.mpf(a) - mp.mpf(b)) < tol


# -- acceptance summary: one pass/fail line per criterion -----------------------

_acceptance_results = {}


def record_acceptance(number, label, passed, detail=""):
    _acceptance_results[number] = (label, passed, detail)


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance_results):
        label, passed, detail = _acceptance_results[number]
        status = "PASS" if passed else "FAIL"
        line = f"[{number:>2}] {status}  {label}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
