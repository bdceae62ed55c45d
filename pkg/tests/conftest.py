import numpy as np
import pytest

from fncalc.forms import FormKernel, KernelTerm, VectorForm
from fncalc.poly import PolyExpr


def field(*components: PolyExpr) -> VectorForm:
    return VectorForm(FormKernel.vector_field(components))


def const_form(m: int, p: int, entries) -> VectorForm:
    """Constant-coefficient form from [(covariant 1-based, output 1-based, value)]."""
    terms = [KernelTerm(tuple(i - 1 for i in cov), out - 1, PolyExpr.const(m, c)) for cov, out, c in entries]
    return VectorForm(FormKernel(m, p, terms))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def line_fields():
    """X = x d/dx and Y = d/dx on R."""
    x = PolyExpr.var(1, 0)
    return field(x), field(PolyExpr.const(1, 1.0))


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for key in ("passed", "failed")
        for report in terminalreporter.stats.get(key, [])
        if report.when == "call"
        for name, value in report.user_properties
        if name == "acceptance"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
