import importlib
import math

import numpy as np
import pytest

from cavity_xyz import _kernels_py, kernels

BACKENDS = kernels.available_backends()
needs_cython = pytest.mark.skipif("cython" not in BACKENDS,
                                  reason="compiled extension not built")


def _params(rng, pair=True):
    p = np.zeros(kernels.N_PARAMS)
    p[0:6] = rng.uniform(-1, 1, 6)
    p[9:12] = rng.uniform(-0.5, 0.5, 3)
    p[12] = rng.uniform(0, 0.2)
    if pair:
        p[6:9] = rng.uniform(0.1, 1), rng.uniform(-3, 3), rng.uniform(-math.pi, math.pi)
    return p


def test_python_backend_is_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_env_flag_forces_python(monkeypatch):
    monkeypatch.setenv("CXYZ_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
        assert mod.integrate is _kernels_py.integrate
    finally:
        monkeypatch.delenv("CXYZ_PURE_PYTHON")
        importlib.reload(kernels)


def test_torque_static_example():
    p = np.zeros(kernels.N_PARAMS)
    p[0] = 1.0
    assert _kernels_py.torque(p, 0.0, np.array([1.0, 1.0, 0.0])) == pytest.approx((0, 0, 2))


def test_pair_term_rotates_axes():
    p = np.zeros(kernels.N_PARAMS)
    p[6], p[7] = 1.0, 2.0
    v = np.array([0.3, -0.4, 0.8])
    # at delta t = pi the pair form flips sign
    a = _kernels_py.torque(p, math.pi / 2, v)
    b = _kernels_py.torque(p, 0.0, v)
    assert a == pytest.approx(-np.asarray(b))


def test_integrate_reports_budget_exhaustion():
    p = np.zeros(kernels.N_PARAMS)
    p[0], p[2] = 1.0, -1.0
    ys, n_acc, n_rej, status, t_last, y_last = _kernels_py.integrate(
        p, np.array([0.3, 0.5, 0.8]), np.array([0.0, 50.0]), 1e-10, 1e-10, 0.0, 5)
    assert status == kernels.STATUS_MAX_STEPS
    assert 0 < t_last < 50


@needs_cython
@pytest.mark.parametrize("pair", [False, True])
def test_torque_parity(rng, pair):
    c = BACKENDS["cython"]
    for _ in range(20):
        p = _params(rng, pair)
        v = rng.normal(size=3)
        t = rng.uniform(0, 3)
        assert np.asarray(c.torque(p, t, v)) == pytest.approx(
            np.asarray(_kernels_py.torque(p, t, v)), rel=1e-14, abs=1e-14)


@needs_cython
@pytest.mark.parametrize("pair", [False, True])
def test_integrate_parity(rng, pair):
    c = BACKENDS["cython"]
    for _ in range(5):
        p = _params(rng, pair)
        y0 = rng.normal(size=3) * 3
        t_out = np.linspace(0, 2.0, 7)
        a = c.integrate(p, y0, t_out, 1e-10, 1e-10, 0.0, 100000)
        b = _kernels_py.integrate(p, y0, t_out, 1e-10, 1e-10, 0.0, 100000)
        assert np.asarray(a[0]) == pytest.approx(np.asarray(b[0]), rel=1e-11, abs=1e-11)
        assert a[1:4] == b[1:4]


@needs_cython
def test_flow_batch_parity(rng):
    c = BACKENDS["cython"]
    p = _params(rng)
    starts = rng.normal(size=(30, 3))
    fa, sa = c.flow_batch(p, starts, 0.7, 1e-10, 1e-10)
    fb, sb = _kernels_py.flow_batch(p, starts, 0.7, 1e-10, 1e-10)
    assert np.asarray(fa) == pytest.approx(np.asarray(fb), rel=1e-11, abs=1e-11)
    assert np.array_equal(np.asarray(sa), np.asarray(sb))
