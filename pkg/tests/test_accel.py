import os
import subprocess
import sys

import numpy as np
import pytest

from malab import kernels
from malab._accel import NUMBA_ENABLED, python_version
from malab.problem import ProblemSpec

BARRIER_PAR = np.array([8 / 7, 0.25, -1.0])


def _solve_args(system):
    if system in (kernels.RADIAL, kernels.RADIAL_LOG):
        par = ProblemSpec(2, 1).params
        u0 = 1 / 48 if system == kernels.RADIAL else np.log(1 / 48)
        du0 = 4 / 48 if system == kernels.RADIAL else 4.0
        return (system, par, 1.0, u0, du0, np.linspace(1.5, 5.0, 8), 0, np.array([np.inf]),
                1e-10, 1e-12, np.inf, 1e-14, 0.0)
    if system == kernels.ZETA:
        return (system, BARRIER_PAR, 1e-3, 0.13, 0.01, np.geomspace(2e-3, 10.0, 8), 0,
                np.array([np.inf]), 1e-10, 1e-12, np.inf, 1e-14, 0.0)
    return (system, BARRIER_PAR, 0.0, 1e-3, 0.13, np.linspace(0.1, 2.0, 8), 0,
            np.array([np.inf]), 1e-10, 1e-12, np.inf, 1e-14, 0.0)


@pytest.mark.parametrize("system", [kernels.RADIAL, kernels.RADIAL_LOG, kernels.ZETA, kernels.PHI_OF_LOGR])
def test_solve_parity(system):
    args = _solve_args(system)
    fast = kernels.solve(*args)
    slow = python_version(kernels.solve)(*args)
    assert fast[6] == slow[6] == kernels.STATUS_COMPLETED
    assert fast[2] == slow[2]
    np.testing.assert_allclose(fast[1], slow[1], rtol=1e-12)
    assert abs(fast[7] - slow[7]) <= 1


def test_stencil_parity_and_exactness():
    x = np.sort(np.random.default_rng(3).uniform(0, 2, 40))
    y = x**4 - 2 * x
    d1, d2 = kernels.stencil_derivatives(x, y, 5)
    p1, p2 = python_version(kernels.stencil_derivatives)(x, y, 5)
    np.testing.assert_allclose(d1, p1, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(d2, p2, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(d1, 4 * x**3 - 2, rtol=1e-8, atol=1e-8)
    np.testing.assert_allclose(d2, 12 * x**2, rtol=1e-7, atol=1e-7)


def test_fornberg_central_weights():
    w = kernels.fornberg_weights(0.0, np.arange(-2.0, 3.0), 2)
    np.testing.assert_allclose(w[1], np.array([1, -8, 0, 8, -1]) / 12, atol=1e-15)
    np.testing.assert_allclose(w[2], np.array([-1, 16, -30, 16, -1]) / 12, atol=1e-14)


def test_flag_selects_python_path():
    code = "import malab._accel as a, malab.kernels as k; print(a.NUMBA_ENABLED, hasattr(k.solve, 'py_func'))"
    env = dict(os.environ, MALAB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "False"]


@pytest.mark.skipif(not NUMBA_ENABLED, reason="numba path disabled")
def test_numba_path_compiled():
    assert hasattr(kernels.solve, "py_func")
