import numpy as np
import pytest

from dualcurv.bodies import Ball, Ellipsoid, PolytopeH, ProductCylinder, cube


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def cube3():
    return cube(3)


def random_directions(rng, size, n):
    g = rng.standard_normal((size, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def body_zoo():
    """One body of each symmetric representation, in R^3."""
    return [
        Ball(1.3, 3),
        Ellipsoid(np.diag([1.0, 0.25, 4.0])),
        PolytopeH([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], [1, 1, 1, 2]),
        ProductCylinder(0.5, 1, 3),
    ]


# acceptance criteria register their verdicts here; printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
