import numpy as np
import pytest

from polyvi import PolyhedralSet, PolynomialMap

# ((x1 - x2)^2, (x1 - x2)^2) on the nonnegative orthant
EX1_TERMS = {(r, e): c for r in (0, 1) for e, c in (((2, 0), 1.0), ((1, 1), -2.0), ((0, 2), 1.0))}


def example1():
    return PolyhedralSet.orthant(2), PolynomialMap.from_terms(2, 2, EX1_TERMS)


def example2():
    # (x1^3, x2^3) on the half-plane x1 >= 0
    return PolyhedralSet([[-1.0, 0.0]], [0.0]), PolynomialMap.from_terms(2, 3, {(0, (3, 0)): 1.0, (1, (0, 3)): 1.0})


def example2_solution(p):
    p1, p2 = p
    return np.array([np.cbrt(-p1) if p1 < 0 else 0.0, np.cbrt(-p2)])


def triangle():
    return PolyhedralSet([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])


def unit_box(n=2):
    return PolyhedralSet.box(np.zeros(n), np.ones(n))


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def ex2():
    return example2()



# acceptance reporting: one PASS/FAIL line per criterion in the terminal summary

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        num, title = m.args
        prev = _criteria.get(num, (title, True))
        _criteria[num] = (title, prev[1] and not rep.failed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, ok = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}")
