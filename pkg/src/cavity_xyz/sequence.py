"""Emulated experimental protocols on the mean-field or exact backend.

Rotation convention: ``rotate(state, phase, angle)`` is a right-handed
rotation by ``angle`` about ``(cos phase, sin phase, 0)``; the exact backend
applies ``exp(-i angle J_phase)``.  A lab pulse "along phi" tips the Bloch
vector towards azimuth phi, i.e. it rotates about the axis at ``phi + pi/2``.
With this convention the flow-readout sequences give

    Jz|dtheta = -J sin(dtheta),   Jz|dphi = -J sin(theta_f) sin(dphi),

so the estimators carry a minus sign.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import meanfield as mf
from . import spin


@dataclass(frozen=True)
class PulseSpec:
    axis_phase: float
    area: float
    duration: float = 0.0

    def __post_init__(self):
        if not 0 <= self.area < 2 * math.pi:
            raise ValueError(f"pulse area must lie in [0, 2pi), got {self.area!r}")
        if not math.isfinite(self.axis_phase):
            raise ValueError("axis_phase must be finite")


def lab_pulse(phase, area, duration=0.0):
    """Bragg pulse tipping the spin towards azimuth ``phase``."""
    return PulseSpec((phase + math.pi / 2) % (2 * math.pi), area % (2 * math.pi),
                     duration)


def _rotation_matrix(axis_phase, angle):
    n = np.array([math.cos(axis_phase), math.sin(axis_phase), 0.0])
    k = mf._cross_matrix(n)
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)


def rotate(state, axis_phase, angle):
    """Rotate a BlochState, a bare 3-vector or a DickeState."""
    if isinstance(state, spin.DickeState):
        u = spin.rotation_operator(state.basis, axis_phase, angle).matrix
        if state.kind == "pure":
            return spin.DickeState._trusted(state.basis, u @ state.data, "pure")
        return spin.DickeState._trusted(state.basis, u @ state.data @ u.conj().T, "mixed")
    r = _rotation_matrix(axis_phase, angle)
    if isinstance(state, mf.BlochState):
        d = r @ state.direction
        return mf.BlochState(d / np.linalg.norm(d), state.magnitude)
    return r @ np.asarray(state, dtype=float)


def apply_pulse(state, pulse):
    return rotate(state, pulse.axis_phase, pulse.area)


def prepare_coherent(theta, phi, n_atoms, backend="meanfield"):
    """Coherent state at (theta, phi) reached from all atoms up by one pulse."""
    if not 0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    if backend == "meanfield":
        return rotate(mf.BlochState(np.array([0.0, 0.0, 1.0]), n_atoms / 2),
                      phi + math.pi / 2, theta)
    if backend == "exact":
        basis = spin.DickeBasis(n_atoms)
        return rotate(spin.DickeState.dicke(basis, n_atoms / 2), phi + math.pi / 2, theta)
    raise ValueError(f"unknown backend {backend!r}")


def dtheta_sequence(theta_i, phi_i):
    """Echo pi-pulse along phi_i, then (pi/2 + theta_i) along phi_i + pi."""
    return [lab_pulse(phi_i, math.pi), lab_pulse(phi_i + math.pi, math.pi / 2 + theta_i)]


def dphi_sequence(theta_i, phi_i):
    """Echo pi-pulse along phi_i, then pi/2 along phi_i + pi/2."""
    return [lab_pulse(phi_i, math.pi), lab_pulse(phi_i + math.pi / 2, math.pi / 2)]


def _hamiltonian(spec, basis):
    if not spec.resonant or spec.gamma_sr != 0:
        raise ValueError("the exact backend supports resonant specs without "
                         "superradiance")
    h = spin.build_xyz_hamiltonian(spec.xyz, basis)
    ops = spin.build_collective_ops(basis)
    for hv, name in zip(spec.drive, ("Jx", "Jy", "Jz")):
        if hv:
            h = h + hv * ops[name]
    return h


def _interact(spec, state, dt, backend, tol):
    if backend == "meanfield":
        return mf.BlochState.from_vector(mf.evolve(spec, state.vector, dt, tol))
    return spin.evolve_unitary(_hamiltonian(spec, state.basis), state, dt)


def _mean(state):
    if isinstance(state, mf.BlochState):
        return state.vector
    return np.asarray(spin.spin_moments(state).mean)


def _readout_jz(state, rng, shots):
    if rng is None or isinstance(state, mf.BlochState):
        return float(_mean(state)[2])
    probs = (np.abs(state.data) ** 2 if state.kind == "pure"
             else np.real(np.diag(state.data)))
    probs = np.clip(probs, 0, None)
    probs /= probs.sum()
    m = state.basis.m_values
    return float(np.mean(rng.choice(m, size=shots, p=probs)))


def measure_flow(spec, theta_i, phi_i, dt, n_atoms, mode="direct",
                 backend="meanfield", tol=1e-10, seed=None, shots=1):
    """Flow sample at one initial state.

    ``direct`` reads the angles off the evolved mean spin; ``sequence-emulated``
    applies the echo and mapping pulses and converts the Jz readouts with the
    estimators dtheta = -Jz|dtheta / J and dphi = -Jz|dphi / (J sin theta_i).
    ``seed`` switches on projection-noise sampling of the Jz readout (exact
    backend only, ``shots`` draws averaged).
    """
    mf.check_short_time(spec, n_atoms, dt, strict=False)
    start = prepare_coherent(theta_i, phi_i, n_atoms, backend)
    final = _interact(spec, start, dt, backend, tol)
    ji, jf = _mean(start), _mean(final)
    if mode == "direct":
        return mf._sample(theta_i, phi_i, ji, jf, dt)
    if mode != "sequence-emulated":
        raise ValueError(f"unknown mode {mode!r}")
    if abs(math.sin(theta_i)) < 1e-6:
        raise ValueError("azimuth undefined at the poles (|sin theta_i| < 1e-6)")
    rng = np.random.default_rng(seed) if seed is not None else None
    j = n_atoms / 2
    readouts = []
    for seq in (dtheta_sequence(theta_i, phi_i), dphi_sequence(theta_i, phi_i)):
        s = final
        for pulse in seq:
            s = apply_pulse(s, pulse)
        readouts.append(_readout_jz(s, rng, shots))
    dtheta = -readouts[0] / j
    dphi = -readouts[1] / (j * math.sin(theta_i))
    return mf.FlowSample(float(theta_i), float(phi_i), ji, jf, (jf - ji) / dt,
                         dtheta, dphi)


@dataclass(frozen=True)
class ScanSpec:
    variable: str
    values: tuple
    spec: mf.EOMSpec
    theta_i: float
    phi_i: float
    dt: float
    n_atoms: int = 700

    def __post_init__(self):
        if self.variable not in ("delta", "theta_i", "phi_i"):
            raise ValueError(f"unknown scan variable {self.variable!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals or not all(math.isfinite(v) for v in vals):
            raise ValueError("scan values must be finite and non-empty")
        object.__setattr__(self, "values", vals)


def _with_delta(spec, delta):
    if spec.time_dependent is None:
        raise ValueError("a detuning scan needs a time-dependent spec")
    td = spec.time_dependent
    return mf.EOMSpec(None, spec.gamma_sr, spec.drive,
                      mf.PairDrive(td.chi_e, td.chi_pair, delta, td.phase, td.linear_z))


def four_photon_scan(spec, deltas, theta_i, phi_i, dt, n_atoms,
                     observable="dphi", tol=1e-10):
    """(delta, change) pairs for the rotating-axis dynamics.

    ``observable`` is 'dphi' (azimuthal change) or 'djz' (change of Jz).
    """
    if observable not in ("dphi", "djz"):
        raise ValueError(f"unknown observable {observable!r}")
    j0 = n_atoms / 2 * np.array([math.sin(theta_i) * math.cos(phi_i),
                                 math.sin(theta_i) * math.sin(phi_i),
                                 math.cos(theta_i)])
    out = []
    for d in deltas:
        jf = mf.evolve(_with_delta(spec, float(d)), j0, dt, tol)
        if observable == "djz":
            out.append((float(d), float(jf[2] - j0[2])))
        else:
            dphi = mf.wrap_angle(mf.vector_angles(jf)[1] - mf.vector_angles(j0)[1])
            out.append((float(d), dphi))
    return out


def ring_scan(spec, theta_i, dt, n_points, n_atoms, tol=1e-10):
    """Final vectors for a ring of initial states at fixed polar angle."""
    mf.check_short_time(spec, n_atoms, dt, strict=False)
    theta, phis = mf.ring_points(theta_i, n_points)
    starts = n_atoms / 2 * np.stack([np.sin(theta) * np.cos(phis),
                                     np.sin(theta) * np.sin(phis), np.cos(theta)], axis=1)
    finals = mf.propagate_many(spec, starts, dt, tol)
    return [(float(p), f) for p, f in zip(phis, finals)]


def run_scan(scan, observable="dphi", tol=1e-10):
    """Evaluate a ScanSpec; returns (value, observable) pairs."""
    if scan.variable == "delta":
        return four_photon_scan(scan.spec, scan.values, scan.theta_i, scan.phi_i,
                                scan.dt, scan.n_atoms, observable, tol)
    out = []
    for v in scan.values:
        th = v if scan.variable == "theta_i" else scan.theta_i
        ph = v if scan.variable == "phi_i" else scan.phi_i
        jf = mf.evolve(scan.spec, scan.n_atoms / 2 * np.array(
            [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]),
            scan.dt, tol)
        if observable == "djz":
            out.append((v, float(jf[2] - scan.n_atoms / 2 * math.cos(th))))
        else:
            out.append((v, mf.wrap_angle(mf.vector_angles(jf)[1] - ph)))
    return out
