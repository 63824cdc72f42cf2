import pytest

from projtrace.ideals import close, jacobson_radical, unit_ideal, zero_ideal
from projtrace.ring import modular, triangular

# triangular(2,2) encoding: ((a, b), (0, c)) -> a + 2b + 4c
E11, E12, E22, ONE = 1, 2, 4, 5


@pytest.fixture(scope="session")
def T22():
    return triangular(2, 2)


@pytest.fixture(scope="session")
def T32():
    return triangular(3, 2)


@pytest.fixture(scope="session")
def Z6():
    return modular(6)


@pytest.fixture(scope="session")
def lattice(T22):
    """The five two-sided ideals of triangular(2,2)."""
    return {
        "0": zero_ideal(T22),
        "N": jacobson_radical(T22),
        "P1": close(T22, [E11]),
        "Q2": close(T22, [E22]),
        "R": unit_ideal(T22),
    }


# --------------------------------------------------- acceptance reporting

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("acceptance")
    if mark is None or call.when != "call":
        return
    n, title = mark.args
    ok = call.excinfo is None
    _ACCEPTANCE[n] = (ok, title)
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {title}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, title = _ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}")
