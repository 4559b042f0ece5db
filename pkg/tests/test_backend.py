import os
import subprocess
import sys

import numpy as np
import pytest

from potkernels import BACKEND, _kernels_py, kernels
from potkernels.geometry import build_grid
from potkernels.reference import fixture

compiled = pytest.importorskip("potkernels._kernels") if BACKEND == "cython" else None


@pytest.fixture(scope="module")
def grid():
    return build_grid(fixture("trig2").domain, 64)


def test_backend_name():
    assert BACKEND in ("cython", "python")
    assert kernels.BACKEND == BACKEND


@pytest.mark.skipif(compiled is None, reason="compiled extension not built")
def test_ks_matrix_agrees(grid):
    a = compiled.ks_matrix(grid.z, grid.T, grid.w)
    b = _kernels_py.ks_matrix(grid.z, grid.T, grid.w)
    assert np.max(np.abs(a - b)) < 1e-14 * np.max(np.abs(b))
    assert np.all(np.diag(a) == 0)


@pytest.mark.skipif(compiled is None, reason="compiled extension not built")
@pytest.mark.parametrize("order", [0, 1])
def test_cauchy_sum_agrees(grid, order):
    rng = np.random.default_rng(3)
    F = rng.normal(size=(3, grid.size)) + 1j * rng.normal(size=(3, grid.size))
    x = np.array([0.5 + 0.5j, -0.6 + 0.1j, 0.0 - 0.7j])
    zw = grid.T * grid.w
    a = compiled.cauchy_sum(F, grid.z, zw, x, order)
    b = _kernels_py.cauchy_sum(F, grid.z, zw, x, order)
    assert np.max(np.abs(a - b)) < 1e-13 * np.max(np.abs(b))


def test_read_only_inputs(grid):
    # grid arrays are frozen; both backends must accept them
    assert not grid.z.flags.writeable
    kernels.ks_matrix(grid.z, grid.T, grid.w)


def test_fallback_forced():
    env = dict(os.environ, POTKERNELS_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import potkernels; print(potkernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_fallback_solves_the_same(annulus):
    code = (
        "import numpy as np\n"
        "from potkernels.szego import assemble\n"
        "from potkernels.reference import fixture\n"
        "d = assemble(fixture('annulus-0.5').domain, 256, 0.7)\n"
        "print(repr(complex(d.szego(0.6 + 0.2j, -0.7j))))\n"
    )
    env = dict(os.environ, POTKERNELS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    v = complex(out.stdout.strip())
    assert abs(v - annulus.szego.szego(0.6 + 0.2j, -0.7j)) < 1e-12
