import math

import numpy as np
import pytest

from lmisophote.frames import frenet_apparatus
from lmisophote.isophote import extract_isophotes, make_axis
from lmisophote.surface import builtin_surface, darboux_apparatus, parse_surface_expr, surface_curve

COTH1 = math.cosh(1.0) / math.sinh(1.0)
HYPERBOLOID_SRC = "cosh(u), sinh(u)*cos(v), sinh(u)*sin(v)"
HYPERBOLOID_DOMAIN = (0.1, 2.0, -math.pi, math.pi)


@pytest.fixture(scope="session")
def hyperboloid():
    return builtin_surface("hyperboloid")


@pytest.fixture(scope="session")
def parsed_hyperboloid():
    return parse_surface_expr(HYPERBOLOID_SRC, HYPERBOLOID_DOMAIN, (False, True))


@pytest.fixture(scope="session")
def latitude_axis():
    return make_axis([1, 0, 0], "timelike", 1.0)


@pytest.fixture(scope="session")
def latitude_polys(hyperboloid, latitude_axis):
    return extract_isophotes(hyperboloid, latitude_axis, grid_n=256, refine_tol=1e-8)


@pytest.fixture(scope="session")
def latitude_darboux(latitude_polys):
    return darboux_apparatus(latitude_polys[0].curve)


@pytest.fixture(scope="session")
def latitude_frenet(latitude_polys):
    return frenet_apparatus(latitude_polys[0].trace)


@pytest.fixture(scope="session")
def spacelike_polys(hyperboloid):
    return extract_isophotes(hyperboloid, make_axis([0, 1, 0], "spacelike", 0.5), grid_n=256)


@pytest.fixture(scope="session")
def meridian_curve(hyperboloid):
    u = np.linspace(0.3, 1.8, 300)
    return surface_curve(hyperboloid, np.stack([u, np.zeros_like(u)], axis=1), closed=False)


@pytest.fixture(scope="session")
def meridian_darboux(meridian_curve):
    return darboux_apparatus(meridian_curve)


# -- acceptance verdicts: one PASS/FAIL line per criterion in the terminal summary --

ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        verdict, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {title}  [{detail}]")
