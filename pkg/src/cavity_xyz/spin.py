"""Exact collective-spin dynamics in the maximal-J Dicke manifold.

Basis states are |J=N/2, m> ordered by ascending m, so index ``k`` carries
``m = k - N/2``.  hbar = 1 and all rates are angular.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import warnings

import numpy as np
import scipy.linalg as linalg
from scipy.special import gammaln, xlogy


class SpinError(ValueError):
    """Invalid input to an exact-backend operation."""


@dataclass(frozen=True)
class DickeBasis:
    n_atoms: int

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise SpinError(f"n_atoms must be a positive integer, got {self.n_atoms}")

    @property
    def dimension(self):
        return self.n_atoms + 1

    @property
    def spin(self):
        return self.n_atoms / 2

    @property
    def m_values(self):
        return np.arange(self.dimension) - self.spin


@dataclass(frozen=True, eq=False)
class CollectiveOperator:
    basis: DickeBasis
    matrix: np.ndarray

    def __post_init__(self):
        d = self.basis.dimension
        if self.matrix.shape != (d, d):
            raise SpinError(f"operator shape {self.matrix.shape} != ({d}, {d})")

    def dagger(self):
        return CollectiveOperator(self.basis, self.matrix.conj().T)

    def is_hermitian(self, atol=1e-12):
        return np.allclose(self.matrix, self.matrix.conj().T, atol=atol, rtol=0)

    def __add__(self, other):
        return CollectiveOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other):
        return CollectiveOperator(self.basis, self.matrix - other.matrix)

    def __mul__(self, scalar):
        return CollectiveOperator(self.basis, scalar * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return CollectiveOperator(self.basis, self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class DickeState:
    """Pure state (amplitude vector) or mixed state (density matrix)."""

    basis: DickeBasis
    data: np.ndarray
    kind: str = field(default="pure")

    def __post_init__(self):
        d = self.basis.dimension
        if self.kind == "pure":
            if self.data.shape != (d,):
                raise SpinError(f"pure state must have shape ({d},)")
            norm = np.linalg.norm(self.data)
            if abs(norm - 1) > 1e-10:
                raise SpinError(f"pure state not normalized (|psi| = {norm!r})")
        elif self.kind == "mixed":
            rho = self.data
            if rho.shape != (d, d):
                raise SpinError(f"density matrix must have shape ({d}, {d})")
            tr = np.trace(rho).real
            if abs(tr - 1) > 1e-10:
                raise SpinError(f"density matrix trace {tr!r} != 1")
            if not np.allclose(rho, rho.conj().T, atol=1e-10, rtol=0):
                raise SpinError("density matrix not Hermitian")
            if np.linalg.eigvalsh(rho).min() < -1e-8:
                raise SpinError("density matrix not positive semidefinite")
        else:
            raise SpinError(f"unknown state kind {self.kind!r}")

    @classmethod
    def pure(cls, basis, amplitudes):
        return cls(basis, np.asarray(amplitudes, dtype=complex), "pure")

    @classmethod
    def mixed(cls, basis, rho):
        return cls(basis, np.asarray(rho, dtype=complex), "mixed")

    @classmethod
    def dicke(cls, basis, m):
        """The basis state |N/2, m>."""
        k = int(round(m + basis.spin))
        if not 0 <= k < basis.dimension or abs(k - basis.spin - m) > 1e-12:
            raise SpinError(f"m = {m} not in the manifold of N = {basis.n_atoms}")
        psi = np.zeros(basis.dimension, dtype=complex)
        psi[k] = 1
        return cls(basis, psi, "pure")

    @classmethod
    def maximally_mixed(cls, basis):
        d = basis.dimension
        return cls(basis, np.eye(d, dtype=complex) / d, "mixed")

    @classmethod
    def _trusted(cls, basis, data, kind):
        # skips validation; for solver output that may sit just outside it
        state = object.__new__(cls)
        object.__setattr__(state, "basis", basis)
        object.__setattr__(state, "data", data)
        object.__setattr__(state, "kind", kind)
        return state

    def density(self):
        if self.kind == "mixed":
            return self.data
        return np.outer(self.data, self.data.conj())

    def expect(self, op):
        m = op.matrix if isinstance(op, CollectiveOperator) else op
        if self.kind == "pure":
            return self.data.conj() @ (m @ self.data)
        return np.trace(m @ self.data)


@dataclass(frozen=True)
class SpinMoments:
    mean: np.ndarray
    covariance: np.ndarray


@lru_cache(maxsize=32)
def _ladder_matrices(n_atoms):
    s = n_atoms / 2
    m = np.arange(n_atoms) - s  # m of the state being raised
    jp = np.diag(np.sqrt(s * (s + 1) - m * (m + 1)), -1).astype(complex)
    jz = np.diag(np.arange(n_atoms + 1) - s).astype(complex)
    for a in (jp, jz):
        a.setflags(write=False)
    return jp, jz


def build_collective_ops(basis):
    """Return ``{"Jx", "Jy", "Jz", "Jplus", "Jminus"}`` for the manifold."""
    jp, jz = _ladder_matrices(basis.n_atoms)
    jm = jp.conj().T
    return {
        "Jx": CollectiveOperator(basis, (jp + jm) / 2),
        "Jy": CollectiveOperator(basis, (jp - jm) / 2j),
        "Jz": CollectiveOperator(basis, jz.copy()),
        "Jplus": CollectiveOperator(basis, jp.copy()),
        "Jminus": CollectiveOperator(basis, jm),
    }


def build_xyz_hamiltonian(xyz, basis, linear_z=0.0):
    """H = chi_x Jx^2 + chi_y Jy^2 + chi_z Jz^2 (+ linear_z * Jz).

    ``xyz`` is anything with ``chi_x``, ``chi_y``, ``chi_z`` attributes.  The
    Casimir gauge term is a multiple of the identity here and is left out.
    """
    ops = build_collective_ops(basis)
    jx, jy, jz = (ops[k].matrix for k in ("Jx", "Jy", "Jz"))
    h = xyz.chi_x * (jx @ jx) + xyz.chi_y * (jy @ jy) + xyz.chi_z * (jz @ jz)
    if linear_z:
        h = h + linear_z * jz
    h = (h + h.conj().T) / 2
    return CollectiveOperator(basis, h)


def _require_pure(state):
    if state.kind != "pure":
        raise SpinError("evolve_unitary needs a pure state; use evolve_lindblad")


def evolve_unitary(hamiltonian, psi0, t):
    """exp(-iHt) psi0 by Hermitian eigendecomposition.

    ``t`` may be a scalar (returns a DickeState) or a 1-D array of times
    (returns a list, one state per time, from a single diagonalization).
    """
    _require_pure(psi0)
    if not hamiltonian.is_hermitian(atol=1e-9 * max(1.0, np.abs(hamiltonian.matrix).max())):
        raise SpinError("Hamiltonian is not Hermitian")
    energies, vecs = np.linalg.eigh(hamiltonian.matrix)
    coeffs = vecs.conj().T @ psi0.data
    times = np.atleast_1d(np.asarray(t, dtype=float))
    out = []
    for tk in times:
        psi = vecs @ (np.exp(-1j * energies * tk) * coeffs)
        out.append(DickeState(psi0.basis, psi, "pure"))
    return out[0] if np.ndim(t) == 0 else out


def _lindblad_rhs(h, ls, ldl):
    def rhs(rho):
        out = -1j * (h @ rho - rho @ h)
        for l, lhl in zip(ls, ldl):
            out += l @ rho @ l.conj().T - 0.5 * (lhl @ rho + rho @ lhl)
        return out
    return rhs


def _rk4(rhs, rho, dt):
    k1 = rhs(rho)
    k2 = rhs(rho + 0.5 * dt * k1)
    k3 = rhs(rho + 0.5 * dt * k2)
    k4 = rhs(rho + dt * k3)
    return rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve_lindblad(hamiltonian, jumps, rho0, t, dt_max, tol=1e-10,
                    psd_tol=1e-8):
    """Integrate the master equation

        d rho/dt = -i[H, rho] + sum_k rate_k (L_k rho L_k^+ - {L_k^+ L_k, rho}/2)

    with classic RK4.  Each interval of length <= ``dt_max`` is compared
    against two half steps; when they differ by more than ``tol`` (max-abs)
    the interval is split, down to 2**-30 of ``dt_max``.  ``jumps`` is a list
    of ``(rate, CollectiveOperator)``.  A pure ``rho0`` is promoted to a
    density matrix.
    """
    for rate, _ in jumps:
        if rate < 0:
            raise SpinError(f"negative jump rate {rate!r}")
    if dt_max <= 0:
        raise SpinError("dt_max must be positive")
    h = hamiltonian.matrix
    ls = [np.sqrt(rate) * op.matrix for rate, op in jumps if rate > 0]
    ldl = [l.conj().T @ l for l in ls]
    rhs = _lindblad_rhs(h, ls, ldl)
    rho = rho0.density().astype(complex)
    if t < 0:
        raise SpinError("negative evolution time")
    n = max(1, int(np.ceil(t / dt_max - 1e-12)))
    dt = t / n if t > 0 else 0.0

    def advance(rho, span, depth):
        full = _rk4(rhs, rho, span)
        half = _rk4(rhs, _rk4(rhs, rho, span / 2), span / 2)
        if np.abs(full - half).max() <= tol or depth >= 30:
            return half
        return advance(advance(rho, span / 2, depth + 1), span / 2, depth + 1)

    if dt > 0:
        for _ in range(n):
            rho = advance(rho, dt, 0)
    rho = (rho + rho.conj().T) / 2
    low = np.linalg.eigvalsh(rho).min()
    if low < -psd_tol:
        warnings.warn(f"density matrix lost positivity (min eigenvalue {low:.3e})",
                      RuntimeWarning, stacklevel=2)
    return DickeState._trusted(rho0.basis, rho, "mixed")


def spin_moments(state):
    """Mean spin and symmetrized covariance Cov_ab = <{Ja, Jb}>/2 - <Ja><Jb>."""
    ops = build_collective_ops(state.basis)
    js = [ops[k].matrix for k in ("Jx", "Jy", "Jz")]
    mean = np.array([state.expect(j).real for j in js])
    cov = np.empty((3, 3))
    for a in range(3):
        for b in range(a, 3):
            sym = 0.5 * (js[a] @ js[b] + js[b] @ js[a])
            cov[a, b] = cov[b, a] = state.expect(sym).real - mean[a] * mean[b]
    return SpinMoments(mean, cov)


def perpendicular_frame(direction):
    """Two unit vectors completing ``direction`` to a right-handed frame."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    helper = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, n)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


def min_perpendicular_variance(moments):
    """Smallest spin variance over directions perpendicular to the mean spin."""
    e1, e2 = perpendicular_frame(moments.mean)
    frame = np.stack([e1, e2])
    block = frame @ moments.covariance @ frame.T
    return float(np.linalg.eigvalsh(block)[0])


def squeezing_parameter(state):
    """Kitagawa-Ueda and Wineland squeezing parameters.

    xi2_kitagawa = 4 Var_min / N and xi2_wineland = N Var_min / |<J>|^2, with
    Var_min minimized over directions perpendicular to <J>.  The two differ
    by the squared contrast |<J>| / (N/2).
    """
    mom = spin_moments(state)
    length = np.linalg.norm(mom.mean)
    n = state.basis.n_atoms
    if length < 1e-9 * n:
        raise SpinError("mean spin vanishes; squeezing reference direction undefined")
    var = min_perpendicular_variance(mom)
    return {"xi2_kitagawa": 4 * var / n, "xi2_wineland": n * var / length**2}


def rotation_operator(basis, axis_phase, angle):
    """exp(-i angle (cos(phi) Jx + sin(phi) Jy)): right-handed rotation of <J>."""
    ops = build_collective_ops(basis)
    gen = np.cos(axis_phase) * ops["Jx"].matrix + np.sin(axis_phase) * ops["Jy"].matrix
    return CollectiveOperator(basis, linalg.expm(-1j * angle * gen))


def coherent_state(basis, theta, phi):
    """Spin-coherent state pointing along (theta, phi), closed form.

    Amplitude of |m> is sqrt(C(N, J+m)) cos(theta/2)^(J+m) sin(theta/2)^(J-m)
    e^{-i m phi}, computed in log space for large N.
    """
    n = basis.n_atoms
    k = np.arange(n + 1)  # k = J + m, number of up spins
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    with np.errstate(divide="ignore"):
        log_mag = (0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))
                   + xlogy(k, abs(c)) + xlogy(n - k, abs(s)))
    sign = np.sign(c) ** k * np.sign(s) ** (n - k)
    amp = np.where(np.isfinite(log_mag), np.exp(log_mag), 0.0) * sign
    psi = amp * np.exp(-1j * (k - n / 2) * phi)
    return DickeState(basis, psi / np.linalg.norm(psi), "pure")
