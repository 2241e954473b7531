import sys

import mpmath
import pytest

from folkman.graph import Graph


def log2_exact(q, prec=600):
    """High-precision point value of log2 of a positive rational, independent of the interval code."""
    with mpmath.workprec(prec):
        return mpmath.log(mpmath.mpf(q.numerator)) / mpmath.log(2) - mpmath.log(mpmath.mpf(q.denominator)) / mpmath.log(2)


def encloses(li, q) -> bool:
    with mpmath.workprec(600):
        v = log2_exact(q)
        return mpmath.mpf(li.lo) <= v <= mpmath.mpf(li.hi)


@pytest.fixture
def k5():
    from folkman.graph import complete_graph

    return complete_graph(5)


def pentagon_coloring(g: Graph):
    # colour 1 on the cycle 0-1-2-3-4-0, colour 2 on the pentagram
    cyc = {frozenset((i, (i + 1) % 5)) for i in range(5)}
    return [1 if frozenset(e) in cyc else 2 for e in g.edges()]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
