import math

import numpy as np
import pytest

from lmisophote.errors import ExprDomainError, ExprSyntaxError, UnknownIdentifier
from lmisophote.exprparse import compile_components, compile_expr, tokenize


def ev(src, u=0.0, v=0.0):
    return float(compile_expr(src)(u, v))


@pytest.mark.parametrize("src, want", [
    ("1 + 2 * 3", 7.0),
    ("(1 + 2) * 3", 9.0),
    ("2 ^ 3 ^ 2", 512.0),
    ("-2 ^ 2", -4.0),
    ("2 ^ -1", 0.5),
    ("8 / 4 / 2", 1.0),
    ("1 - 2 - 3", -4.0),
    ("--3", 3.0),
    ("pi", math.pi),
    ("e", math.e),
    ("sqrt(16) + log(e) + exp(0)", 6.0),
    ("sinh(0) + cosh(0) + tanh(0) + sin(0) + cos(0) + tan(0)", 2.0),
    ("1.5e2 + .5", 150.5),
])
def test_arithmetic(src, want):
    assert ev(src) == pytest.approx(want, rel=1e-15)


def test_variables_and_broadcasting():
    f = compile_expr("u * v + u ^ 2")
    u = np.linspace(0, 1, 5)
    assert np.allclose(f(u, 2.0), u * 2 + u**2)


def test_hyperboloid_components():
    comps = compile_components("cosh(u), sinh(u)*cos(v), sinh(u)*sin(v)")
    assert [float(c(1.0, 0.0)) for c in comps] == pytest.approx([math.cosh(1), math.sinh(1), 0.0])


def test_graph_components():
    comps = compile_components("sqrt(1+u^2+v^2), u, v")
    assert [float(c(0.0, 0.0)) for c in comps] == [1.0, 0.0, 0.0]


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as ei:
        compile_components("u+, v, 0")
    assert ei.value.offset == 2
    assert ei.value.expected


@pytest.mark.parametrize("src, offset", [("u, v", 4), ("u, v, 0, 1", 7), ("(u, v, 0", 2),
                                         ("u v, v, 0", 2), ("sin u, v, 0", 4)])
def test_syntax_error_locations(src, offset):
    with pytest.raises(ExprSyntaxError) as ei:
        compile_components(src)
    assert ei.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as ei:
        compile_components("u, w, 0")
    assert ei.value.name == "w" and ei.value.offset == 3


def test_bad_character():
    with pytest.raises(ExprSyntaxError):
        tokenize("u $ v")


@pytest.mark.parametrize("src", ["log(u)", "sqrt(u - 1)", "1 / u", "u ^ 0.5 - 1"])
def test_domain_errors(src):
    with pytest.raises(ExprDomainError):
        compile_expr(src)(np.array([-1.0, 0.0]), 0.0)
