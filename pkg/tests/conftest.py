import numpy as np
import pytest

from potkernels import assemble, build_bundle
from potkernels.reference import fixture

ACCEPTANCE_LINES = []


def make_bundle(name, N=None, a="auto"):
    f = fixture(name)
    return build_bundle(assemble(f.domain, N or f.N, a))


@pytest.fixture(scope="session")
def disc():
    return make_bundle("disc", 128, 0.3)


@pytest.fixture(scope="session")
def disc0():
    return make_bundle("disc", 128, 0.0)


@pytest.fixture(scope="session")
def annulus():
    return make_bundle("annulus-0.5", 256, 0.7)


@pytest.fixture(scope="session")
def three():
    return make_bundle("3conn")


@pytest.fixture(scope="session")
def trig2():
    return make_bundle("trig2")


@pytest.fixture(scope="session")
def offset():
    return make_bundle("offset-disc")


@pytest.fixture(scope="session")
def bundles(disc, offset, annulus, three, trig2):
    return {"disc": disc, "offset-disc": offset, "annulus-0.5": annulus, "3conn": three, "trig2": trig2}


def interior_sample(domain, count, seed=0, clearance=0.1):
    """Uniform points in the outer bounding box kept if ``clearance`` inside."""
    rng = np.random.default_rng(seed)
    poly = domain._polys[-1]
    out = []
    while len(out) < count:
        c = (poly.real.min() + np.ptp(poly.real) * rng.random(64)
             + 1j * (poly.imag.min() + np.ptp(poly.imag) * rng.random(64)))
        c = c[domain.contains(c)]
        c = c[domain.boundary_distance(c) > clearance]
        out.extend(c.tolist())
    return np.array(out[:count])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
