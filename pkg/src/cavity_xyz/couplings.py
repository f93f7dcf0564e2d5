"""Cavity and dressing-tone parameters -> collective spin couplings.

All frequencies are angular (rad/s).  Tone detunings follow the sideband
convention ``delta_c1 = (w1 - wc) + wz`` and ``delta_c2 = (w2 - wc) - wz``, so
the four-photon detuning is ``delta_c2 - delta_c1`` and the mean detuning is
their average.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.optimize import brentq

from . import spin

TACT_RATIO = (math.sqrt(2) - 1) / (math.sqrt(2) + 1)


class CouplingError(ValueError):
    """Parameters that do not define a valid coupling computation."""


@dataclass(frozen=True)
class CavityParams:
    g0: float
    kappa: float
    delta_a: float
    omega_z: float
    n_atoms: int = 700

    def __post_init__(self):
        for name in ("g0", "kappa", "omega_z"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise CouplingError(f"{name} must be positive and finite, got {v!r}")
        if not math.isfinite(self.delta_a) or self.delta_a == 0:
            raise CouplingError(f"delta_a must be nonzero and finite, got {self.delta_a!r}")
        if abs(self.delta_a) < 10 * self.kappa:
            warnings.warn("|delta_a| is not much larger than kappa; the dispersive "
                          "elimination is unreliable", RuntimeWarning, stacklevel=2)
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise CouplingError(f"n_atoms must be a positive integer, got {self.n_atoms!r}")

    @property
    def dispersive_shift(self):
        """Single-photon light shift g0^2 / (4 delta_a)."""
        return self.g0**2 / (4 * self.delta_a)


@dataclass(frozen=True)
class ToneSet:
    alpha1: complex
    alpha2: complex
    delta_c1: float
    delta_c2: float
    phi_int: float = 0.0

    def __post_init__(self):
        for name in ("delta_c1", "delta_c2", "phi_int"):
            if not math.isfinite(getattr(self, name)):
                raise CouplingError(f"{name} must be finite")
        for name in ("alpha1", "alpha2"):
            if not np.isfinite(complex(getattr(self, name))):
                raise CouplingError(f"{name} must be finite")

    @property
    def delta_bar(self):
        return 0.5 * (self.delta_c1 + self.delta_c2)

    @property
    def delta(self):
        return self.delta_c2 - self.delta_c1

    @property
    def amplitude_ratio(self):
        a1 = abs(self.alpha1)
        return abs(self.alpha2) / a1 if a1 else math.inf

    @classmethod
    def symmetric(cls, alpha1, ratio, delta_bar, delta=0.0, phi_int=0.0):
        """Tones with |alpha2/alpha1| = ratio around mean detuning delta_bar."""
        return cls(alpha1, ratio * alpha1, delta_bar - delta / 2,
                   delta_bar + delta / 2, phi_int)


@dataclass(frozen=True)
class CouplingSet:
    """Photon-mediated couplings.

    ``chi_p`` is the pair-raising amplitude multiplying ``J+J+ e^{i delta t}``;
    the canonical pair coupling entering ``chi_x, chi_y`` is ``chi_pair``.
    """

    chi_e: float
    chi_p: complex
    gamma_sr: float
    delta: float
    phi_int: float = 0.0

    @property
    def chi_pair(self):
        return 2 * self.chi_p.real

    @property
    def chi_pair_abs(self):
        return 2 * abs(self.chi_p)


@dataclass(frozen=True)
class XYZCouplings:
    chi_x: float
    chi_y: float
    chi_z: float
    casimir_gauge: float = 0.0

    def as_tuple(self):
        return (self.chi_x, self.chi_y, self.chi_z)

    def shifted(self, c):
        """Add c * J.J (a pure gauge change inside the Dicke manifold)."""
        return XYZCouplings(self.chi_x + c, self.chi_y + c, self.chi_z + c,
                            self.casimir_gauge + c)

    @property
    def twist_strength(self):
        """Largest pairwise coupling difference; gauge invariant."""
        x, y, z = self.as_tuple()
        return max(abs(x - y), abs(y - z), abs(z - x))


def classical_field(drive_amplitude, detuning_from_cavity, kappa):
    """Steady intracavity field eps / (i kappa/2 + Delta) of one drive tone."""
    if kappa <= 0:
        raise CouplingError("kappa must be positive")
    return complex(drive_amplitude) / (0.5j * kappa + detuning_from_cavity)


def _dispersion(detuning, kappa, include_kappa, label):
    if include_kappa:
        return detuning / (detuning**2 + kappa**2 / 4)
    if abs(detuning) < kappa / 100:
        raise CouplingError(
            f"{label} = {detuning:.6g} rad/s is within kappa/100 of the cavity "
            "pole; enable include_kappa")
    return 1.0 / detuning


def coupling_strengths(cav, tones, include_kappa=True, include_extra_sidebands=False):
    """Exchange, pair and superradiance couplings for two dressing tones.

    With ``include_kappa`` the cavity Lorentzian is kept in every denominator;
    without it the dispersive 1/Delta limit is used.  ``include_extra_sidebands``
    adds the lower sideband of tone 1 at ``delta_c1 - 2 omega_z``, whose
    exchange contribution carries the sign of that detuning.
    """
    pref = cav.dispersive_shift**2
    k = cav.kappa
    d1, d2 = tones.delta_c1, tones.delta_c2
    p1, p2 = abs(tones.alpha1) ** 2, abs(tones.alpha2) ** 2

    chi_e = pref * (p1 * _dispersion(d1, k, include_kappa, "delta_c1")
                    + p2 * _dispersion(d2, k, include_kappa, "delta_c2"))
    if include_extra_sidebands:
        d3 = d1 - 2 * cav.omega_z
        chi_e += pref * p1 * _dispersion(d3, k, include_kappa, "delta_c1 - 2 omega_z")

    kk = k if include_kappa else 0.0
    pair_sum = 1 / (d1 + 0.5j * kk) + 1 / (d2 - 0.5j * kk)
    chi_p = (pref * abs(tones.alpha1) * abs(tones.alpha2)
             * np.exp(1j * tones.phi_int) / 2 * pair_sum)

    gamma = k * pref * (p1 / (d1**2 + k**2 / 4) - p2 / (d2**2 + k**2 / 4))
    return CouplingSet(float(chi_e), complex(chi_p), float(gamma), tones.delta,
                       tones.phi_int)


def xyz_from_couplings(c, chi_z_gauge=0.0):
    """Resonant XYZ form: chi_x = chi_e + chi_P + g, chi_y = chi_e - chi_P + g,
    chi_z = g, where g is a free Casimir gauge and chi_P = 2 Re(chi_p).
    """
    scale = max(abs(c.chi_e), abs(c.chi_p), 1e-300)
    if c.delta != 0:
        raise CouplingError(
            f"four-photon detuning {c.delta!r} rad/s is nonzero; the pair term "
            "rotates in time, use meanfield.integrate_time_dependent")
    if c.phi_int != 0 or abs(c.chi_p.imag) > 1e-12 * scale:
        raise CouplingError(
            "nonzero pair phase: the pair axes are rotated about z; only the "
            "time-dependent integrator handles it")
    cp = c.chi_pair
    g = chi_z_gauge
    return XYZCouplings(c.chi_e + cp + g, c.chi_e - cp + g, g, g)


def _exchange_weights(cav, delta_c1, delta_c2, include_kappa):
    k = cav.kappa
    d3 = delta_c1 - 2 * cav.omega_z
    return (_dispersion(delta_c1, k, include_kappa, "delta_c1"),
            _dispersion(delta_c2, k, include_kappa, "delta_c2"),
            _dispersion(d3, k, include_kappa, "delta_c1 - 2 omega_z"))


def cancellation_ratio(cav, delta_c1, delta_c2, include_kappa=True, r_max=1e6):
    """Amplitude ratio |alpha2/alpha1| that zeroes the three-sideband exchange.

    Solves ``w1 + r^2 w2 + w3 = 0`` for r > 0, with ``w_i`` the dispersive
    weights of the tone-1, tone-2 and tone-1 lower-sideband detunings.
    """
    if 0.5 * (delta_c1 + delta_c2) <= cav.omega_z:
        raise CouplingError(
            "exchange cancellation needs both tones on the blue side with mean "
            "detuning above omega_z")
    w1, w2, w3 = _exchange_weights(cav, delta_c1, delta_c2, include_kappa)

    def residual(r):
        return (w1 + r * r * w2 + w3) / (abs(w1) + r * r * abs(w2) + abs(w3))

    lo, hi = 0.0, 1.0
    f_lo, f_hi = residual(lo), residual(hi)
    while f_lo * f_hi > 0 and hi < r_max:
        hi *= 2
        f_hi = residual(hi)
    if f_lo * f_hi > 0:
        raise CouplingError(
            f"no positive root: residual sign {np.sign(f_lo):+.0f} at r=0 and "
            f"{np.sign(f_hi):+.0f} at r={hi:.3g}")
    r = brentq(residual, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
               maxiter=500)
    if abs(residual(r)) > 1e-12:
        raise CouplingError(f"cancellation solve did not converge (residual {residual(r):.3e})")
    return r


def chirp_schedule(omega_z0, d_omega_z_dt, t):
    """Doppler frequency under the gravity chirp: omega_z0 + rate * t."""
    return omega_z0 + d_omega_z_dt * np.asarray(t, dtype=float)


def tone_separation_schedule(separation0, d_omega_z_dt, t):
    """Dressing-tone separation ramped at twice the Doppler chirp rate."""
    return separation0 + 2 * d_omega_z_dt * np.asarray(t, dtype=float)


def secular_jump_rates(cav, tones):
    """Collective decay rates (gamma_plus, gamma_minus) for J+ and J-.

    Each dressing tone drives one collective jump channel through the cavity
    Lorentzian; cross terms between the channels rotate at the tone
    detunings and are dropped.  gamma_plus - gamma_minus equals the mean-field
    superradiance rate.
    """
    pref = cav.dispersive_shift**2
    k = cav.kappa
    g_plus = k * pref * abs(tones.alpha1) ** 2 / (tones.delta_c1**2 + k**2 / 4)
    g_minus = k * pref * abs(tones.alpha2) ** 2 / (tones.delta_c2**2 + k**2 / 4)
    return g_plus, g_minus


def effective_jumps(cav, tones, basis):
    """Jump list ``[(gamma_plus, J+), (gamma_minus, J-)]`` for evolve_lindblad."""
    ops = spin.build_collective_ops(basis)
    g_plus, g_minus = secular_jump_rates(cav, tones)
    return [(g_plus, ops["Jplus"]), (g_minus, ops["Jminus"])]
