import numpy as np
import pytest

from harmonic_newton import make_builtin

CATALOG = {
    "mpw": dict(n=3, r=0.6),
    "rhie": dict(n=3, r=0.6, eps=0.004),
    "wilmshurst": dict(n=3),
    "tan_conj": {},
    "einstein": {},
    "isothermal": dict(k=1.92, w=-0.67j),
}


def finite_difference_wirtinger(fmap, z, step=1e-5):
    """(d/dz, d/dzbar) of f from central differences in x and y."""
    fx = (fmap(z + step) - fmap(z - step)) / (2 * step)
    fy = (fmap(z + 1j * step) - fmap(z - 1j * step)) / (2 * step)
    return (fx - 1j * fy) / 2, (fx + 1j * fy) / 2


def smooth_points(fmap, rng, count=50, box=1.8, margin=0.15):
    """Random points away from poles and (for isothermal) the arcsine cuts."""
    pts = []
    while len(pts) < count:
        z = complex(rng.uniform(-box, box), rng.uniform(-box, box))
        if any(abs(z - p) < margin for p, _ in fmap.poles):
            continue
        if fmap.name.startswith("isothermal"):
            w = fmap.params["w"]
            if abs((z + w).imag) < margin:
                continue
        pts.append(z)
    return np.array(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def mpw3():
    return make_builtin("mpw", n=3, r=0.6)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
