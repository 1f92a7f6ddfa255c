import numpy as np
import pytest

from varconv import builtin


@pytest.fixture
def f1():
    return builtin("f1_neg_quartic")


@pytest.fixture
def f2():
    return builtin("f2_zero")


@pytest.fixture
def fabs():
    return builtin("abs")


@pytest.fixture
def ind():
    return builtin("indicator_halfline")


@pytest.fixture
def fsharp():
    return builtin("flagship_jump")


@pytest.fixture
def orthant():
    return builtin("orthant_quad(2,3)")


def pairs_1d(pwset):
    """(P, W) scalars of a 1D PWSet as a sorted list of tuples."""
    return sorted((float(p.P[0, 0]), float(p.W[0, 0])) for p in pwset)


def assert_close(a, b, tol):
    assert np.allclose(a, b, atol=tol, rtol=0), (a, b)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(test_acceptance.RESULTS):
        ok, note = test_acceptance.RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {note}")
