import numpy as np
import pytest

from multroot.parse import parse_system

EXAMPLE_TEXT = """vars: x y
f1 = x^3/3 + y^2*x + x^2 + 2*x*y + y^2
f2 = x^2*y - y^2*x + x^2 + 2*x*y + y^2
"""

X0 = np.array([-0.01, 0.02])


@pytest.fixture(scope="session")
def example():
    return parse_system(EXAMPLE_TEXT)


def random_terms(rng, n, max_degree, n_terms, complex_coeffs=True):
    terms = {}
    for _ in range(n_terms):
        d = int(rng.integers(0, max_degree + 1))
        e = [0] * n
        for _ in range(d):
            e[int(rng.integers(0, n))] += 1
        c = rng.normal()
        if complex_coeffs:
            c = c + 1j * rng.normal()
        terms[tuple(e)] = terms.get(tuple(e), 0) + complex(c)
    return terms


_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        props = dict(report.user_properties)
        crit = props.get("criterion")
        if crit is None:
            return
        _criteria[crit] = (report.outcome == "passed", props.get("summary", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_criteria, key=lambda c: (len(c), c)):
        ok, summary = _criteria[crit]
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {summary}")
