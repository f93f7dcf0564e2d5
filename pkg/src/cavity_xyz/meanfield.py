"""Mean-field Bloch-vector dynamics of collective quadratic spin models.

The mean-field energy is ``E(J) = J.A(t).J + h.J`` and the Bloch vector obeys
``dJ/dt = grad(E) x J`` plus the superradiant drift
``gamma * (-Jx Jz, -Jy Jz, Jx^2 + Jy^2)``, all of which conserve ``|J|``.
Vectors carry their physical length ``J = N/2``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import math
import warnings

import numpy as np

from . import kernels
from .couplings import XYZCouplings
from .spin import perpendicular_frame


class IntegrationError(RuntimeError):
    """Adaptive integration failed; carries the last accepted state."""

    def __init__(self, message, t_last, last_state):
        super().__init__(message)
        self.t_last = t_last
        self.last_state = last_state


@dataclass(frozen=True)
class BlochState:
    direction: np.ndarray
    magnitude: float

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (3,) or abs(np.linalg.norm(d) - 1) > 1e-12:
            raise ValueError("direction must be a unit 3-vector")
        if not self.magnitude > 0:
            raise ValueError("magnitude must be positive")
        object.__setattr__(self, "direction", d)

    @classmethod
    def from_angles(cls, theta, phi, magnitude):
        return cls(np.array([math.sin(theta) * math.cos(phi),
                             math.sin(theta) * math.sin(phi),
                             math.cos(theta)]), magnitude)

    @classmethod
    def from_vector(cls, vector):
        v = np.asarray(vector, dtype=float)
        length = float(np.linalg.norm(v))
        return cls(v / length, length)

    @classmethod
    def for_atoms(cls, direction, n_atoms):
        d = np.asarray(direction, dtype=float)
        return cls(d / np.linalg.norm(d), n_atoms / 2)

    @property
    def vector(self):
        return self.magnitude * self.direction

    @property
    def angles(self):
        return vector_angles(self.direction)


def vector_angles(v):
    """(theta, phi) of a 3-vector; phi in (-pi, pi]."""
    x, y, z = v
    r = math.sqrt(x * x + y * y + z * z)
    return math.acos(max(-1.0, min(1.0, z / r))), math.atan2(y, x)


def wrap_angle(a):
    """Map an angle to (-pi, pi]."""
    return -((-a + math.pi) % (2 * math.pi) - math.pi)


@dataclass(frozen=True)
class PairDrive:
    """Exchange plus a pair term rotating at the four-photon detuning.

    Mean-field energy ``chi_e (Jx^2 + Jy^2) + chi_pair Re(e^{i a} (Jx + i Jy)^2)``
    with ``a = delta t + phase``: a twisting axis turning at ``-delta/2``.
    ``linear_z`` re-enables the chi_e Jz term from normal ordering J+J-.
    """

    chi_e: float
    chi_pair: float
    delta: float
    phase: float = 0.0
    linear_z: bool = False

    @classmethod
    def from_couplings(cls, c, linear_z=False):
        return cls(c.chi_e, 2 * abs(c.chi_p), c.delta,
                   float(np.angle(c.chi_p)) if c.chi_p else 0.0, linear_z)


@dataclass(frozen=True)
class EOMSpec:
    xyz: XYZCouplings | None = None
    gamma_sr: float = 0.0
    drive: tuple = (0.0, 0.0, 0.0)
    time_dependent: PairDrive | None = None

    def __post_init__(self):
        if (self.xyz is None) == (self.time_dependent is None):
            raise ValueError("exactly one of xyz / time_dependent must be set")
        object.__setattr__(self, "drive", tuple(float(v) for v in self.drive))
        vals = list(self.drive) + [self.gamma_sr]
        if self.xyz is not None:
            vals += list(self.xyz.as_tuple())
        else:
            td = self.time_dependent
            vals += [td.chi_e, td.chi_pair, td.delta, td.phase]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("EOM parameters must be finite")

    @property
    def resonant(self):
        return self.xyz is not None

    def params(self):
        """Kernel parameter vector (see ``_kernels_py``)."""
        hx, hy, hz = self.drive
        if self.resonant:
            cx, cy, cz = self.xyz.as_tuple()
            return np.array([cx, cy, cz, 0, 0, 0, 0, 0, 0, hx, hy, hz,
                             self.gamma_sr], dtype=float)
        td = self.time_dependent
        if td.linear_z:
            hz += td.chi_e
        return np.array([td.chi_e, td.chi_e, 0, 0, 0, 0, td.chi_pair, td.delta,
                         td.phase, hx, hy, hz, self.gamma_sr], dtype=float)

    @property
    def twist_strength(self):
        """Largest pairwise difference of the quadratic-form eigenvalues."""
        if self.resonant:
            return self.xyz.twist_strength
        td = self.time_dependent
        ev = (td.chi_e + td.chi_pair, td.chi_e - td.chi_pair, 0.0)
        return max(abs(a - b) for a in ev for b in ev)

    def rate_scale(self, n_atoms):
        """Characteristic angular rate: twist * N, drive or superradiance."""
        return max(self.twist_strength * n_atoms, float(np.linalg.norm(self.drive)),
                   abs(self.gamma_sr) * n_atoms)


def xyz_spec(chi_x, chi_y, chi_z=0.0, gamma_sr=0.0, drive=(0.0, 0.0, 0.0)):
    return EOMSpec(XYZCouplings(chi_x, chi_y, chi_z), gamma_sr, drive)


def lmg_spec(chi, delta):
    """LMG model chi Jz^2 + delta Jy."""
    return EOMSpec(XYZCouplings(0.0, 0.0, chi), 0.0, (0.0, delta, 0.0))


def _as_vector(J):
    if isinstance(J, BlochState):
        return J.vector
    return np.asarray(J, dtype=float)


def torque(spec, J):
    """Instantaneous dJ/dt for a resonant (time-independent) spec."""
    if not spec.resonant:
        raise ValueError("time-dependent spec: the torque depends on t; use "
                         "integrate_time_dependent or torque_at")
    return kernels.torque(spec.params(), 0.0, _as_vector(J))


def torque_at(spec, J, t):
    """dJ/dt at time ``t`` for either kind of spec."""
    return kernels.torque(spec.params(), float(t), _as_vector(J))


def energy(spec, J, t=0.0):
    """Mean-field energy J.A(t).J + h.J (the conserved quantity when gamma = 0
    and the spec is resonant)."""
    p = spec.params()
    v = _as_vector(J)
    a = np.array([[p[0], p[3], p[4]], [p[3], p[1], p[5]], [p[4], p[5], p[2]]])
    if p[6]:
        ang = p[7] * t + p[8]
        c, s = math.cos(ang), math.sin(ang)
        a = a + p[6] * np.array([[c, -s, 0], [-s, -c, 0], [0, 0, 0]])
    return float(v @ a @ v + p[9:12] @ v)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    n_accept: int = 0
    n_reject: int = 0

    @property
    def final(self):
        return self.states[-1]


def _check_tol(tol):
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-13, 1e-6], got {tol!r}")


def _run(spec, J0, duration, tol, t_eval, n_samples, max_steps=1_000_000):
    _check_tol(tol)
    y0 = _as_vector(J0)
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if t_eval is None:
        t_eval = np.linspace(0.0, duration, max(2, n_samples or 2))
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval[0] != 0.0:
        t_eval = np.concatenate([[0.0], t_eval])
    if np.any(np.diff(t_eval) < 0):
        raise ValueError("t_eval must be non-decreasing")
    scale = float(np.linalg.norm(y0))
    ys, n_acc, n_rej, status, t_last, y_last = kernels.integrate(
        spec.params(), y0, t_eval, tol, tol * scale, 0.0, max_steps)
    if status != kernels.STATUS_OK:
        why = "step size underflow" if status == kernels.STATUS_UNDERFLOW else "step budget exhausted"
        raise IntegrationError(f"integration failed at t={t_last:.6g}: {why}",
                               t_last, np.asarray(y_last))
    return Trajectory(t_eval, ys, int(n_acc), int(n_rej))


def integrate(spec, J0, duration, tol=1e-10, t_eval=None, n_samples=None,
              max_steps=1_000_000):
    """Adaptive Dormand-Prince 5(4) integration of a resonant spec.

    Output times are hit exactly (the step is clipped, never interpolated).
    ``tol`` is the relative tolerance; the absolute tolerance is
    ``tol * |J0|``.
    """
    if not spec.resonant:
        raise ValueError("time-dependent spec; use integrate_time_dependent")
    return _run(spec, J0, duration, tol, t_eval, n_samples, max_steps)


def integrate_time_dependent(spec, J0, duration, tol=1e-10, t_eval=None,
                             n_samples=None, max_steps=1_000_000):
    """Integrate exchange plus a pair term rotating at the four-photon detuning."""
    if spec.resonant:
        raise ValueError("resonant spec; use integrate")
    return _run(spec, J0, duration, tol, t_eval, n_samples, max_steps)


def evolve(spec, J0, duration, tol=1e-10):
    """Final Bloch vector after ``duration`` for either kind of spec."""
    return _run(spec, J0, duration, tol, None, None).final


def _cross_matrix(v):
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def jacobian(spec, J):
    """Analytic 3x3 Jacobian dT/dJ of a resonant spec."""
    if not spec.resonant:
        raise ValueError("jacobian needs a resonant spec")
    v = _as_vector(J)
    a = np.diag(spec.xyz.as_tuple())
    b = 2 * a @ v + np.asarray(spec.drive)
    m = -_cross_matrix(v) @ (2 * a) + _cross_matrix(b)
    g = spec.gamma_sr
    if g:
        x, y, z = v
        m = m + g * np.array([[-z, 0, -x], [0, -z, -y], [2 * x, 2 * y, 0]])
    return m


def tangent_projection(matrix, direction):
    """Restrict a 3x3 linear map to the tangent plane at ``direction``."""
    e1, e2 = perpendicular_frame(direction)
    basis = np.stack([e1, e2], axis=1)
    return basis.T @ matrix @ basis


def jacobian_eigenvalues(spec, point, fixed_tol=1e-9):
    """Tangent-plane eigenvalues of the Jacobian at a fixed point.

    The radial direction always carries a structural zero, so only the 2x2
    tangent block decides stability.  Rates include the spin length N/2.
    """
    v = _as_vector(point)
    t = np.linalg.norm(torque(spec, v))
    scale = spec.rate_scale(2 * np.linalg.norm(v)) * np.linalg.norm(v)
    if t > fixed_tol * max(scale, 1e-300):
        raise ValueError(f"not a fixed point: |T| = {t:.3e}")
    return _sorted_eigs(tangent_projection(jacobian(spec, v), v))


def _sorted_eigs(m):
    ev = [complex(z) for z in np.linalg.eigvals(m)]
    return tuple(sorted(ev, key=lambda z: (z.real, z.imag)))


def axis_eigenvalues(xyz, axis, spin_length):
    """Closed-form tangent eigenvalues at the axis fixed points of a pure XYZ
    model.  ``axis`` is 'x', 'y' or 'z' (sign irrelevant).

    lambda^2 = 4 J^2 (chi_c - chi_a)(chi_a - chi_b) for the fixed point along
    a, with (a, b, c) a cyclic permutation of (x, y, z).
    """
    cx, cy, cz = xyz.as_tuple()
    a, b, c = {"x": (cx, cy, cz), "y": (cy, cz, cx), "z": (cz, cx, cy)}[axis]
    lam2 = 4 * spin_length**2 * (c - a) * (a - b)
    r = math.sqrt(abs(lam2))
    if lam2 >= 0:
        return (complex(-r), complex(r))
    return (complex(0, -r), complex(0, r))


def classify(eigenvalues, scale, tol=1e-9):
    """'stable-center', 'saddle', 'degenerate', or 'attracting'/'repelling'
    for the dissipative case."""
    e1, e2 = eigenvalues
    eps = tol * max(scale, 1e-300)
    if max(abs(e1), abs(e2)) < eps:
        return "degenerate"
    re = (e1.real, e2.real)
    if max(abs(r) for r in re) < eps:
        return "stable-center"
    if max(abs(e1.imag), abs(e2.imag)) < eps and re[0] * re[1] < 0:
        return "saddle"
    if re[0] < eps and re[1] < eps:
        return "attracting"
    if re[0] > -eps and re[1] > -eps:
        return "repelling"
    return "degenerate"


@dataclass(frozen=True)
class FixedPointReport:
    location: BlochState
    classification: str
    eigenvalues: tuple
    note: str = ""


_AXES = {"+x": (1, 0, 0), "-x": (-1, 0, 0), "+y": (0, 1, 0),
         "-y": (0, -1, 0), "+z": (0, 0, 1), "-z": (0, 0, -1)}


def _fibonacci_sphere(n):
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    r = np.sqrt(1 - z * z)
    phi = math.pi * (3 - math.sqrt(5)) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _polish(spec, J, radius, max_iter=60):
    v = radius * np.asarray(J, dtype=float) / np.linalg.norm(J)
    for _ in range(max_iter):
        t = torque(spec, v)
        e1, e2 = perpendicular_frame(v)
        basis = np.stack([e1, e2], axis=1)
        m = basis.T @ jacobian(spec, v) @ basis
        step, *_ = np.linalg.lstsq(m, -basis.T @ t, rcond=None)
        v_new = v + basis @ step
        v_new *= radius / np.linalg.norm(v_new)
        if np.linalg.norm(v_new - v) < 1e-15 * radius:
            v = v_new
            break
        v = v_new
    return v


def fixed_points(spec, n_atoms=700, seeds=200):
    """Fixed points of a resonant spec with tangent-plane classification.

    Pure XYZ flows (no drive, no superradiance) return the six axis points.
    Otherwise torque roots are located by tangent-space Newton iteration from
    the axes plus a Fibonacci lattice of seeds, polished to |T| < 1e-12 of
    the torque scale, and deduplicated.
    """
    if not spec.resonant:
        raise ValueError("fixed points are defined for resonant specs only")
    radius = n_atoms / 2
    scale = spec.rate_scale(n_atoms)
    t_scale = max(scale * radius, 1e-300)
    reports = []
    pure = not any(spec.drive) and spec.gamma_sr == 0
    if pure:
        for label, axis in _AXES.items():
            v = radius * np.array(axis, dtype=float)
            ev = jacobian_eigenvalues(spec, v)
            kind = classify(ev, scale)
            note = ""
            if kind == "degenerate":
                note = ("two couplings equal: fixed points form a great circle "
                        "through this axis")
            reports.append(FixedPointReport(BlochState.for_atoms(axis, n_atoms),
                                            kind, ev, note))
        return reports

    candidates = [radius * np.array(a, dtype=float) for a in _AXES.values()]
    candidates += list(radius * _fibonacci_sphere(seeds))
    found = []
    for c in candidates:
        v = _polish(spec, c, radius)
        if np.linalg.norm(torque(spec, v)) > 1e-12 * t_scale:
            continue
        if any(np.linalg.norm(v - f) < 1e-7 * radius for f in found):
            continue
        found.append(v)
    found.sort(key=lambda v: tuple(-np.round(v / radius, 9)))
    for v in found:
        ev = _sorted_eigs(tangent_projection(jacobian(spec, v), v))
        reports.append(FixedPointReport(BlochState.from_vector(v), classify(ev, scale), ev))
    return reports


def lmg_fixed_points(chi, delta, n_atoms):
    """Closed-form off-axis LMG fixed points (0, d, +-sqrt(1-d^2)) J with
    d = delta / (chi N), valid for 0 < d < 1."""
    d = delta / (chi * n_atoms)
    if not 0 < d < 1:
        return []
    s = math.sqrt(1 - d * d)
    return [np.array([0, d, s]) * n_atoms / 2, np.array([0, d, -s]) * n_atoms / 2]


def lmg_saddle_rate(chi, delta, n_atoms):
    """Growth rate at the +y saddle of the LMG model (0 if not a saddle)."""
    ev = jacobian_eigenvalues(lmg_spec(chi, delta), np.array([0, n_atoms / 2, 0]))
    return max(e.real for e in ev)


def hp_linearize(spec, point):
    """Quadratic bosonic form about a saddle point.

    With J_n = J - c^+c and transverse components sqrt(N)(c + c^+)/2 along e1
    and sqrt(N)(c - c^+)/(2i) along e2 (e1 x e2 = n, e1 in the plane of n and
    z), the local Hamiltonian is
    ``c_da c^+c + c_dd (c^+)^2 + c_aa c^2``.
    """
    v = _as_vector(point)
    ev = jacobian_eigenvalues(spec, v)
    n_atoms = 2 * np.linalg.norm(v)
    if classify(ev, spec.rate_scale(n_atoms)) != "saddle":
        raise ValueError("hp_linearize needs a saddle point")
    n = v / np.linalg.norm(v)
    z = np.array([0.0, 0.0, 1.0])
    e1 = z - (z @ n) * n
    if np.linalg.norm(e1) < 1e-9:
        e1 = np.array([1.0, 0.0, 0.0]) - n[0] * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    chis = np.array(spec.xyz.as_tuple())
    w = e1 - 1j * e2
    c_aa = n_atoms / 4 * np.sum(chis * w**2)
    c_da = (n_atoms / 2 * np.sum(chis * np.abs(w) ** 2)
            - n_atoms * np.sum(chis * n**2) - np.asarray(spec.drive) @ n)
    return {"c_dd": complex(np.conj(c_aa)), "c_aa": complex(c_aa), "c_da": float(c_da)}


# ---------------------------------------------------------------- flow maps

@dataclass(frozen=True)
class FlowGrid:
    projection: str = "saddle-window"
    resolution: int | tuple = 11
    center: tuple = (math.pi / 2, math.pi / 2)
    half_width: float = math.pi / 12

    def points(self):
        """Initial (theta, phi) pairs in a fixed row-major order."""
        kind = self.projection
        res = self.resolution
        if kind == "saddle-window":
            n = int(res)
            th = self.center[0] + np.linspace(-self.half_width, self.half_width, n)
            ph = self.center[1] + np.linspace(-self.half_width, self.half_width, n)
            tt, pp = np.meshgrid(th, ph, indexing="ij")
            return tt.ravel(), pp.ravel()
        if kind == "equirect":
            nt, nph = (res, 2 * res) if np.isscalar(res) else res
            th = (np.arange(nt) + 0.5) * math.pi / nt
            ph = -math.pi + (np.arange(nph) + 0.5) * 2 * math.pi / nph
            tt, pp = np.meshgrid(th, ph, indexing="ij")
            return tt.ravel(), pp.ravel()
        if kind in ("polar-south", "polar-north"):
            n = int(res)
            u = np.linspace(-1, 1, n)
            uu, vv = np.meshgrid(u, u, indexing="ij")
            r = np.hypot(uu, vv)
            keep = r <= 1 + 1e-12
            r, uu, vv = np.minimum(r[keep], 1.0), uu[keep], vv[keep]
            sign = 1 if kind == "polar-south" else -1
            th = math.pi / 2 + sign * (1 - r) * math.pi / 2
            return th, np.arctan2(vv, uu)
        raise ValueError(f"unknown projection {kind!r}")


@dataclass(frozen=True)
class FlowSample:
    theta_i: float
    phi_i: float
    J_initial: np.ndarray
    J_final: np.ndarray
    torque: np.ndarray
    dtheta: float
    dphi: float


def _sample(theta, phi, ji, jf, dt):
    tf, pf = vector_angles(jf)
    return FlowSample(float(theta), float(phi), ji, jf, (jf - ji) / dt,
                      tf - vector_angles(ji)[0], wrap_angle(pf - vector_angles(ji)[1]))


def check_short_time(spec, n_atoms, dt, strict=True):
    """Enforce chi N dt < 0.5 (warn above 0.1) with chi the twist strength."""
    x = spec.rate_scale(n_atoms) * dt
    if x >= 0.5 and strict:
        raise ValueError(f"chi N dt = {x:.3g} >= 0.5: not a short-time flow probe")
    if x > 0.1:
        warnings.warn(f"chi N dt = {x:.3g} > 0.1; flow vectors leave the "
                      "linear-response regime", RuntimeWarning, stacklevel=3)
    return x


def propagate_many(spec, starts, dt, tol=1e-10, workers=1):
    """Final vectors for every row of ``starts``; ordering is preserved."""
    _check_tol(tol)
    starts = np.asarray(starts, dtype=float).reshape(-1, 3)
    p = spec.params()
    radius = float(np.linalg.norm(starts[0])) if len(starts) else 1.0
    if workers <= 1 or len(starts) < 2 * workers:
        finals, status = kernels.flow_batch(p, starts, dt, tol, tol * radius)
    else:
        chunks = np.array_split(starts, workers)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(
                lambda c: kernels.flow_batch(p, c, dt, tol, tol * radius), chunks))
        finals = np.concatenate([f for f, _ in parts])
        status = np.concatenate([s for _, s in parts])
    if np.any(status != kernels.STATUS_OK):
        i = int(np.flatnonzero(status)[0])
        raise IntegrationError(f"flow integration failed for start {i}", dt, finals[i])
    return finals


def flow_map(spec, grid, dt, n_atoms, tol=1e-10, subtract_superradiance=False,
             workers=1, strict=True):
    """Integrate every grid node for ``dt`` and record the flow vector."""
    check_short_time(spec, n_atoms, dt, strict)
    theta, phi = grid.points()
    radius = n_atoms / 2
    starts = radius * np.stack([np.sin(theta) * np.cos(phi),
                                np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1)
    finals = propagate_many(spec, starts, dt, tol, workers)
    samples = [_sample(t, p, ji, jf, dt)
               for t, p, ji, jf in zip(theta, phi, starts, finals)]
    if subtract_superradiance:
        samples = superradiance_subtract(samples, dt)
    return samples


def superradiance_subtract(samples, dt=None):
    """Remove the mean z-displacement common to all samples."""
    if len(samples) < 2:
        raise ValueError("superradiance subtraction needs at least two samples")
    shift = np.mean([s.J_final[2] - s.J_initial[2] for s in samples])
    out = []
    for s in samples:
        span = dt if dt is not None else _sample_dt(s)
        jf = s.J_final - np.array([0.0, 0.0, shift])
        out.append(_sample(s.theta_i, s.phi_i, s.J_initial, jf, span))
    return out


def _sample_dt(s):
    d = s.J_final - s.J_initial
    i = int(np.argmax(np.abs(s.torque)))
    if s.torque[i] == 0:
        return 1.0
    return float(d[i] / s.torque[i])


def saddle_slopes(samples, grid_size, saddle=(0.0, 1.0, 0.0),
                  axes=((1.0, 0.0, 1.0), (1.0, 0.0, -1.0))):
    """Linear-response slopes along the two grid diagonals of a saddle window.

    For each diagonal, projections dJ_i.n and dJ.n (both scaled by N/2) are
    fitted with a cubic polynomial; its linear coefficient is the slope at the
    saddle, free of the curvature of the sphere over the window.  Returns
    ``{"n_plus": slope, "n_minus": slope}`` where each diagonal is assigned to
    the axis it runs along.
    """
    n = int(grid_size)
    if len(samples) != n * n:
        raise ValueError("samples do not form the declared square grid")
    radius = float(np.linalg.norm(samples[0].J_initial))
    center = radius * np.asarray(saddle, dtype=float) / np.linalg.norm(saddle)
    n_hats = [np.asarray(a, dtype=float) / np.linalg.norm(a) for a in axes]
    diagonals = [[i * n + i for i in range(n)], [i * n + (n - 1 - i) for i in range(n)]]
    out = {}
    for idx in diagonals:
        d = np.array([samples[k].J_initial - center for k in idx]) / radius
        dj = np.array([samples[k].J_final - samples[k].J_initial for k in idx]) / radius
        spreads = [np.ptp(d @ nh) for nh in n_hats]
        j = int(np.argmax(spreads))
        x, y = d @ n_hats[j], dj @ n_hats[j]
        coeffs = np.polynomial.polynomial.polyfit(x, y, 3)
        out["n_plus" if j == 0 else "n_minus"] = float(coeffs[1])
    return out


def ring_points(theta, n_points):
    phis = 2 * math.pi * np.arange(n_points) / n_points
    return np.full(n_points, float(theta)), phis
