from fractions import Fraction

import pytest

from gdof import ChannelMatrix, ctin_cyclic_network, fig1_network, symmetric_network

F = Fraction


@pytest.fixture
def fig1():
    return fig1_network()


@pytest.fixture
def cyclic3():
    return ctin_cyclic_network(3)


@pytest.fixture
def allones():
    return symmetric_network(2, 1)


@pytest.fixture
def halfcross():
    return ChannelMatrix.from_rows([[1, F(1, 2)], [F(1, 2), 1]])


_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request, capsys):
    """Record one PASS/FAIL line for an acceptance criterion.

    The line is printed immediately (visible with ``-s``) and repeated in the
    terminal summary so it also appears in captured runs.
    """
    lines = request.config.stash.setdefault(_LINES, [])

    def report(number, ok: bool, text: str, seconds: float, status: str | None = None):
        status = status or ("PASS" if ok else "FAIL")
        line = f"{status} criterion {number}: {text} [{seconds:.2f} s]"
        lines.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return ok
    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
