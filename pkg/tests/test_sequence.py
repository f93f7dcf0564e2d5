import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavity_xyz import meanfield as mf
from cavity_xyz import sequence as sq
from cavity_xyz import spin

N = 700
J = N / 2
CHI = 1e-3


def _tact():
    return mf.xyz_spec(4 * CHI, 2 * CHI, 0.0)


def _dt(spec, strength=0.05):
    return strength / (spec.twist_strength * N)


# ---------------------------------------------------------------- rotations

@pytest.mark.parametrize("axis_phase, angle, vec, expected", [
    (0.0, math.pi / 2, (0, 0, 1), (0, -1, 0)),
    (math.pi / 2, math.pi / 2, (0, 0, 1), (1, 0, 0)),
    (0.0, math.pi, (0, 1, 0), (0, -1, 0)),
    (math.pi / 4, math.pi, (1, 0, 0), (0, 1, 0)),
])
def test_rotate_examples(axis_phase, angle, vec, expected):
    out = sq.rotate(np.array(vec, dtype=float), axis_phase, angle)
    assert out == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("phase", [0.0, 0.5, math.pi])
def test_lab_pulse_tips_towards_phase(phase):
    p = sq.lab_pulse(phase, math.pi / 2)
    out = sq.apply_pulse(np.array([0.0, 0.0, 1.0]), p)
    assert out == pytest.approx((math.cos(phase), math.sin(phase), 0), abs=1e-15)


def test_pulse_validation():
    with pytest.raises(ValueError):
        sq.PulseSpec(0.0, 2 * math.pi)
    with pytest.raises(ValueError):
        sq.PulseSpec(math.nan, 1.0)


def test_double_pi_is_identity_meanfield(rng):
    for _ in range(50):
        v = rng.normal(size=3)
        phase = rng.uniform(0, 2 * math.pi)
        out = sq.rotate(sq.rotate(v, phase, math.pi), phase, math.pi)
        assert out == pytest.approx(v, abs=1e-14)


def test_double_pi_is_identity_exact(rng):
    basis = spin.DickeBasis(6)
    for _ in range(50):
        amp = rng.normal(size=7) + 1j * rng.normal(size=7)
        state = spin.DickeState.pure(basis, amp / np.linalg.norm(amp))
        phase = rng.uniform(0, 2 * math.pi)
        out = sq.rotate(sq.rotate(state, phase, math.pi), phase, math.pi)
        assert abs(np.vdot(state.data, out.data)) == pytest.approx(1, abs=1e-12)


def test_rotate_bloch_state_keeps_magnitude():
    s = mf.BlochState.from_angles(0.4, 1.0, 5.0)
    out = sq.rotate(s, 0.3, 1.2)
    assert out.magnitude == 5.0


@pytest.mark.parametrize("theta, phi", [(0.0, 0.0), (0.7, 1.3), (math.pi / 2, -2.0), (math.pi, 0.4)])
def test_prepare_coherent_matches_closed_form(theta, phi):
    mfs = sq.prepare_coherent(theta, phi, 10)
    assert mfs.vector == pytest.approx(mf.BlochState.from_angles(theta, phi, 5).vector, abs=1e-14)
    ex = sq.prepare_coherent(theta, phi, 10, backend="exact")
    ref = spin.coherent_state(spin.DickeBasis(10), theta, phi)
    assert abs(np.vdot(ref.data, ex.data)) == pytest.approx(1, abs=1e-12)


def test_prepare_coherent_validation():
    with pytest.raises(ValueError):
        sq.prepare_coherent(4.0, 0, 10)
    with pytest.raises(ValueError):
        sq.prepare_coherent(1.0, 0, 10, backend="tensor")


# ------------------------------------------------------------- flow readout

def test_no_interaction_reads_zero():
    spec = mf.xyz_spec(0.0, 0.0, 0.0)
    s = sq.measure_flow(spec, 1.0, 0.3, 1.0, N, mode="sequence-emulated")
    assert s.dtheta == pytest.approx(0, abs=1e-14)
    assert s.dphi == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("theta_i", np.linspace(0.4, math.pi - 0.4, 5))
@pytest.mark.parametrize("phi_i", np.linspace(-math.pi, math.pi, 5, endpoint=False))
def test_sequence_matches_direct(theta_i, phi_i):
    spec = _tact()
    dt = _dt(spec)
    a = sq.measure_flow(spec, theta_i, phi_i, dt, N)
    b = sq.measure_flow(spec, theta_i, phi_i, dt, N, mode="sequence-emulated")
    # the Jz estimators are first order in the displacement
    bound = max(1e-3, 0.05**2)
    assert abs(b.dtheta - a.dtheta) < bound
    assert abs(b.dphi - a.dphi) < bound


@pytest.mark.parametrize("theta_i", [math.pi / 2 - math.pi / 24, math.pi / 2 + math.pi / 24])
def test_sequence_near_saddle(theta_i):
    spec = _tact()
    a = sq.measure_flow(spec, theta_i, math.pi / 2, _dt(spec), N)
    b = sq.measure_flow(spec, theta_i, math.pi / 2, _dt(spec), N, mode="sequence-emulated")
    assert abs(b.dtheta - a.dtheta) < 5e-3 and abs(b.dphi - a.dphi) < 5e-3


def test_oat_equator_has_no_flow():
    spec = mf.xyz_spec(0, 0, CHI)
    for mode in ("direct", "sequence-emulated"):
        s = sq.measure_flow(spec, math.pi / 2, 0.7, 0.05 / (CHI * N), N, mode=mode)
        assert s.dtheta == pytest.approx(0, abs=1e-12)
        assert s.dphi == pytest.approx(0, abs=1e-12)


def test_sequence_error_is_second_order():
    spec = _tact()
    errs = []
    for strength in (0.04, 0.02):
        a = sq.measure_flow(spec, 0.6, 0.5, _dt(spec, strength), N)
        b = sq.measure_flow(spec, 0.6, 0.5, _dt(spec, strength), N, mode="sequence-emulated")
        errs.append(abs(b.dtheta - a.dtheta))
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.1)


def test_sequence_equator_agreement():
    spec = _tact()
    a = sq.measure_flow(spec, math.pi / 2, 0.6, _dt(spec), N)
    b = sq.measure_flow(spec, math.pi / 2, 0.6, _dt(spec), N, mode="sequence-emulated")
    assert b.dtheta == pytest.approx(a.dtheta, abs=1e-6)
    assert b.dphi == pytest.approx(a.dphi, abs=1e-6)


def test_sequence_exact_in_linear_regime():
    # a pure z field: dtheta = 0, dphi = omega dt exactly, so only the
    # small-angle estimator error remains
    w = 1e-3
    spec = mf.xyz_spec(0, 0, 0, drive=(0, 0, w))
    s = sq.measure_flow(spec, 1.1, 0.2, 1.0, N, mode="sequence-emulated")
    assert s.dtheta == pytest.approx(0, abs=w**2)
    assert s.dphi == pytest.approx(math.sin(w), rel=1e-9)


def test_sequence_rejects_poles_and_unknown_mode():
    spec = _tact()
    with pytest.raises(ValueError, match="poles"):
        sq.measure_flow(spec, 0.0, 0.0, _dt(spec), N, mode="sequence-emulated")
    with pytest.raises(ValueError, match="mode"):
        sq.measure_flow(spec, 1.0, 0.0, _dt(spec), N, mode="tomography")


def test_exact_backend_close_to_meanfield():
    n = 40
    spec = mf.xyz_spec(4 * CHI, 2 * CHI, 0.0)
    dt = 0.05 / (spec.twist_strength * n)
    a = sq.measure_flow(spec, 1.0, 0.6, dt, n, mode="sequence-emulated")
    b = sq.measure_flow(spec, 1.0, 0.6, dt, n, mode="sequence-emulated", backend="exact")
    assert b.dtheta == pytest.approx(a.dtheta, abs=2 / n)
    assert b.dphi == pytest.approx(a.dphi, abs=2 / n)


def test_exact_backend_needs_resonant_hamiltonian():
    spec = mf.xyz_spec(4 * CHI, 2 * CHI, 0.0, gamma_sr=1e-4)
    with pytest.raises(ValueError, match="superradiance"):
        sq.measure_flow(spec, 1.0, 0.0, 1.0, 10, backend="exact")


def test_projection_noise_is_seeded():
    spec = mf.xyz_spec(4 * CHI, 2 * CHI, 0.0)
    kw = dict(mode="sequence-emulated", backend="exact", seed=7, shots=20)
    a = sq.measure_flow(spec, 1.0, 0.6, 1.0, 20, **kw)
    b = sq.measure_flow(spec, 1.0, 0.6, 1.0, 20, **kw)
    c = sq.measure_flow(spec, 1.0, 0.6, 1.0, 20, **{**kw, "seed": 8})
    assert (a.dtheta, a.dphi) == (b.dtheta, b.dphi)
    assert (a.dtheta, a.dphi) != (c.dtheta, c.dphi)


# -------------------------------------------------------------------- scans

def _rotating(delta=0.0):
    return mf.EOMSpec(time_dependent=mf.PairDrive(2 * CHI, CHI, delta))


def test_four_photon_scan_zero_detuning_matches_resonant():
    dt = 0.05 / (2 * CHI * N)
    (_, dphi), = sq.four_photon_scan(_rotating(), [0.0], 1.0, 0.4, dt, N)
    direct = sq.measure_flow(mf.xyz_spec(3 * CHI, CHI, 0), 1.0, 0.4, dt, N)
    assert dphi == pytest.approx(direct.dphi, abs=1e-9)


def test_four_photon_scan_mirror_symmetry():
    dt = 0.05 / (2 * CHI * N)
    deltas = np.linspace(-40 / dt, 40 / dt, 21)
    up = sq.four_photon_scan(_rotating(), deltas, math.pi / 4, 0.0, dt, N)
    down = sq.four_photon_scan(_rotating(), -deltas, 3 * math.pi / 4, 0.0, dt, N)
    for (_, a), (_, b) in zip(up, down):
        assert a == pytest.approx(-b, abs=1e-9)


def test_four_photon_wings_antisymmetric_across_equator():
    dt = 0.05 / (2 * CHI * N)
    wings = [-40 / dt, -30 / dt, 30 / dt, 40 / dt]
    up = sq.four_photon_scan(_rotating(), wings, math.pi / 4, math.pi / 2, dt, N)
    down = sq.four_photon_scan(_rotating(), wings, 3 * math.pi / 4, math.pi / 2, dt, N)
    for (_, a), (_, b) in zip(up, down):
        assert a == pytest.approx(-b, rel=0.05)


def test_four_photon_scan_wings_and_observables():
    dt = 0.05 / (2 * CHI * N)
    far = [-40 / dt, 40 / dt]
    lo = sq.four_photon_scan(_rotating(), far, math.pi / 4, 0.0, dt, N)
    hi = sq.four_photon_scan(_rotating(), far, 3 * math.pi / 4, 0.0, dt, N)
    assert all(v < 0 for _, v in lo) and all(v > 0 for _, v in hi)
    djz = sq.four_photon_scan(_rotating(), [0.0], math.pi / 2, 0.0, dt, N, observable="djz")
    assert djz[0][1] == pytest.approx(0, abs=1e-8 * J)
    with pytest.raises(ValueError):
        sq.four_photon_scan(_rotating(), [0.0], 1.0, 0.0, dt, N, observable="jx")


def test_four_photon_scan_needs_time_dependent_spec():
    with pytest.raises(ValueError, match="time-dependent"):
        sq.four_photon_scan(_tact(), [0.0], 1.0, 0.0, 1.0, N)


def _hprime():
    return mf.xyz_spec(2 * CHI, -2 * CHI, 0.0)


def test_ring_scan_equator_alternates_by_quadrant():
    spec = _hprime()
    ring = sq.ring_scan(spec, math.pi / 2, _dt(spec), 72, N)
    by_phi = dict((round(p, 9), jf[2]) for p, jf in ring)
    signs = [np.sign(by_phi[round(math.pi / 4 + k * math.pi / 2, 9)]) for k in range(4)]
    assert signs[0] == -signs[1] == signs[2] == -signs[3] != 0
    assert abs(by_phi[0.0]) < 1e-8 * J


def _major_axis_deg(ring):
    xy = np.array([jf[:2] for _, jf in ring])
    w, v = np.linalg.eigh(np.cov(xy.T))
    return math.degrees(math.atan2(v[1, 1], v[0, 1])) % 180


def test_ring_scan_ellipses_orthogonal_across_equator():
    spec = _hprime()
    dt = 8 * _dt(spec)
    with pytest.warns(RuntimeWarning):
        north = sq.ring_scan(spec, 0.1 * math.pi, dt, 72, N)
        south = sq.ring_scan(spec, 0.9 * math.pi, dt, 72, N)
    assert _major_axis_deg(north) == pytest.approx(135, abs=1e-6)
    assert _major_axis_deg(south) == pytest.approx(45, abs=1e-6)


def test_ring_scan_unchanged_without_coupling():
    ring = sq.ring_scan(mf.xyz_spec(0, 0, 0), 0.7, 1.0, 12, N)
    for phi, jf in ring:
        assert jf == pytest.approx(mf.BlochState.from_angles(0.7, phi, J).vector, abs=1e-12)


@pytest.mark.parametrize("variable", ["theta_i", "phi_i"])
def test_run_scan_angles(variable):
    spec = _tact()
    scan = sq.ScanSpec(variable, [0.5, 1.0], spec, 1.0, 0.3, _dt(spec), N)
    out = sq.run_scan(scan)
    assert [v for v, _ in out] == [0.5, 1.0]


def test_scan_validation():
    with pytest.raises(ValueError):
        sq.ScanSpec("kappa", [1.0], _tact(), 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        sq.ScanSpec("delta", [], _tact(), 1.0, 0.0, 1.0)


@settings(max_examples=20, deadline=None)
@given(theta=st.floats(0.2, math.pi - 0.2), phi=st.floats(-math.pi, math.pi))
def test_estimators_track_direct_angles(theta, phi):
    spec = _tact()
    dt = _dt(spec, 0.01)
    a = sq.measure_flow(spec, theta, phi, dt, N)
    b = sq.measure_flow(spec, theta, phi, dt, N, mode="sequence-emulated")
    bound = a.dtheta**2 + a.dphi**2 + 1e-9
    assert abs(b.dtheta - a.dtheta) <= bound and abs(b.dphi - a.dphi) <= bound
