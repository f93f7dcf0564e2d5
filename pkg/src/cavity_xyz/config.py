"""Run configuration: JSON schema, presets, environment overrides.

Files hold plain frequencies in Hz; conversion to angular units happens in
the ``build_*`` helpers below and nowhere else.

Precedence, lowest first: built-in defaults, ``preset``, the config file,
``CXYZ_`` environment variables.  An environment key spells the config path
in upper case with ``__`` between levels, e.g. ``CXYZ_CAVITY__KAPPA_HZ=60e3``
or ``CXYZ_TONES__1__AMPLITUDE_SQRTPHOTONS=2.5``; values are parsed as JSON
scalars when possible and kept as strings otherwise.
"""

import copy
import json
import math
import os
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from . import couplings as cp
from . import meanfield as mf

TWO_PI = 2 * math.pi
ENV_PREFIX = "CXYZ_"
# process switches sharing the prefix that are not config keys
RESERVED_ENV = frozenset({"CXYZ_PURE_PYTHON", "CXYZ_NO_EXTENSION"})

# default flow-probe strength: twist * N * dt
DEFAULT_FLOW_STRENGTH = 0.05


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending key."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("*", mode="after")
    @classmethod
    def _finite(cls, v):
        if isinstance(v, float) and not math.isfinite(v):
            raise ValueError("value must be finite")
        return v


class Atoms(_Block):
    n: int = Field(700, ge=1)


class Cavity(_Block):
    g0_hz: float = Field(0.48e6, gt=0)
    kappa_hz: float = Field(56e3, gt=0)
    delta_a_hz: float = 500e6
    omega_z_hz: float = Field(500e3, gt=0)

    @field_validator("delta_a_hz")
    @classmethod
    def _nonzero(cls, v):
        if v == 0:
            raise ValueError("must be nonzero")
        return v


class Tone(_Block):
    detuning_hz: float = -200e3
    amplitude_sqrtphotons: float | None = Field(None, ge=0)
    phase_rad: float = 0.0


def _default_tones():
    return [Tone(amplitude_sqrtphotons=7.4), Tone()]


class Interaction(_Block):
    delta_hz: float = 0.0
    phi_int_rad: float = 0.0
    duration_s: float | None = Field(None, gt=0)
    amplitude_ratio: float | None = Field(cp.TACT_RATIO, ge=0)
    chirp_rate_hz_per_s: float = 0.0


class Model(_Block):
    backend: Literal["meanfield", "exact"] = "meanfield"
    gamma_policy: Literal["computed", "zeroed"] = "computed"
    sidebands: Literal["two", "three"] = "two"
    include_kappa: bool = True
    linear_z: bool = False
    tol: float = Field(1e-10, ge=1e-13, le=1e-6)
    workers: int = Field(1, ge=1)


class FlowMapBlock(_Block):
    projection: Literal["polar-south", "polar-north", "equirect", "saddle-window"] = "saddle-window"
    resolution: int = Field(11, ge=2)
    half_width_rad: float = Field(math.pi / 12, gt=0)
    center_theta_rad: float = math.pi / 2
    center_phi_rad: float = math.pi / 2
    subtract_superradiance: bool = False


class SpectroscopyBlock(_Block):
    # None: +-40 / duration rad/s, wide enough to reach the exchange wings
    delta_min_hz: float | None = None
    delta_max_hz: float | None = None
    points: int = Field(81, ge=1)
    theta_rad: list[float] = Field(default_factory=lambda: [math.pi / 4, 3 * math.pi / 4])
    phi_rad: float = math.pi / 2
    observable: Literal["dphi", "djz"] = "dphi"


class EvolveBlock(_Block):
    theta_rad: float = Field(math.pi / 2, ge=0, le=math.pi)
    phi_rad: float = math.pi / 2
    samples: int = Field(51, ge=2)


class SqueezeBlock(_Block):
    n: int = Field(100, ge=2)
    chi_t_max: float = Field(0.2, gt=0)
    points: int = Field(401, ge=2)


class RingBlock(_Block):
    theta_rad: list[float] = Field(default_factory=lambda: [0.1 * math.pi, 0.5 * math.pi, 0.9 * math.pi])
    points: int = Field(72, ge=4)


class RunConfig(_Block):
    preset: str | None = None
    atoms: Atoms = Atoms()
    cavity: Cavity = Cavity()
    tones: list[Tone] = Field(default_factory=_default_tones, min_length=2, max_length=2)
    interaction: Interaction = Interaction()
    model: Model = Model()
    flowmap: FlowMapBlock = FlowMapBlock()
    spectroscopy: SpectroscopyBlock = SpectroscopyBlock()
    evolve: EvolveBlock = EvolveBlock()
    squeeze: SqueezeBlock = SqueezeBlock()
    ring: RingBlock = RingBlock()


PRESETS = {
    "fig1e": {"interaction": {"amplitude_ratio": 1.0}},
    "fig2-oatz": {"interaction": {"amplitude_ratio": 0.0},
                  "flowmap": {"subtract_superradiance": True}},
    "fig2-tact": {"interaction": {"amplitude_ratio": cp.TACT_RATIO},
                  "flowmap": {"subtract_superradiance": True}},
    "fig2-oatx": {"interaction": {"amplitude_ratio": 1.0},
                  "flowmap": {"subtract_superradiance": True}},
    "fig3-saddle": {"interaction": {"amplitude_ratio": cp.TACT_RATIO},
                    "flowmap": {"subtract_superradiance": True}},
    "fig4-hprime": {
        "tones": [{"detuning_hz": 700e3, "amplitude_sqrtphotons": 7.4},
                  {"detuning_hz": 700e3}],
        "interaction": {"amplitude_ratio": None},
        "model": {"sidebands": "three"},
        "flowmap": {"projection": "equirect", "resolution": 24},
    },
}


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        elif isinstance(v, list) and isinstance(out.get(k), list) and all(
                isinstance(x, dict) for x in v):
            merged = list(out[k])
            for i, item in enumerate(v):
                merged[i] = _merge(merged[i], item) if i < len(merged) else item
            out[k] = merged
        else:
            out[k] = copy.deepcopy(v)
    return out


def _env_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def env_overrides(environ=None):
    """Nested override dict built from ``CXYZ_*`` variables."""
    environ = os.environ if environ is None else environ
    out = {}
    for key in sorted(environ):
        if not key.startswith(ENV_PREFIX) or key in RESERVED_ENV:
            continue
        parts = [p.lower() for p in key[len(ENV_PREFIX):].split("__")]
        if not all(parts):
            raise ConfigError(key, "malformed environment override")
        node = out
        for i, part in enumerate(parts[:-1]):
            nxt = parts[i + 1]
            default = [] if nxt.isdigit() else {}
            if part.isdigit():
                idx = int(part)
                while len(node) <= idx:
                    node.append({})
                node = node[idx]
            else:
                node = node.setdefault(part, default)
        last = parts[-1]
        if last.isdigit():
            idx = int(last)
            while len(node) <= idx:
                node.append({})
            node[idx] = _env_value(environ[key])
        else:
            node[last] = _env_value(environ[key])
    return out


def _error_path(err):
    e = err.errors()[0]
    path = ".".join(str(p) for p in e["loc"])
    return ConfigError(path, e["msg"])


def parse_config(text="", environ=None):
    """Validated RunConfig from JSON text (empty text gives the defaults)."""
    text = text.strip()
    try:
        raw = json.loads(text) if text else {}
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("", "top level must be an object")
    raw = _merge(raw, env_overrides(environ))
    return from_dict(raw)


def from_dict(raw):
    preset = raw.get("preset")
    base = _defaults_dict()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; choose from "
                              + ", ".join(sorted(PRESETS)))
        base = _merge(base, PRESETS[preset])
    try:
        cfg = RunConfig.model_validate(_merge(base, raw))
    except ValidationError as err:
        raise _error_path(err) from None
    if cfg.tones[0].amplitude_sqrtphotons is None:
        raise ConfigError("tones.0.amplitude_sqrtphotons", "tone 1 amplitude is required")
    return cfg


def _defaults_dict():
    return RunConfig().model_dump(mode="json")


def load_config(path=None, environ=None):
    text = ""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_config(text, environ)


# ------------------------------------------------------------ physics view

def build_cavity(cfg):
    c = cfg.cavity
    return cp.CavityParams(TWO_PI * c.g0_hz, TWO_PI * c.kappa_hz, TWO_PI * c.delta_a_hz,
                           TWO_PI * c.omega_z_hz, cfg.atoms.n)


def build_tones(cfg, cavity=None):
    """ToneSet in angular units; tone 2's amplitude comes from the explicit
    value, the amplitude ratio, or the three-sideband cancellation solve."""
    t1, t2 = cfg.tones
    it = cfg.interaction
    d1 = TWO_PI * (t1.detuning_hz - it.delta_hz / 2)
    d2 = TWO_PI * (t2.detuning_hz + it.delta_hz / 2)
    a1 = t1.amplitude_sqrtphotons
    if t2.amplitude_sqrtphotons is not None:
        a2 = t2.amplitude_sqrtphotons
    elif it.amplitude_ratio is not None:
        a2 = it.amplitude_ratio * a1
    elif cfg.model.sidebands == "three":
        cav = cavity or build_cavity(cfg)
        try:
            a2 = a1 * cp.cancellation_ratio(cav, d1, d2, cfg.model.include_kappa)
        except cp.CouplingError as exc:
            raise ConfigError("tones.1.amplitude_sqrtphotons", str(exc)) from None
    else:
        raise ConfigError("tones.1.amplitude_sqrtphotons",
                          "set an amplitude, interaction.amplitude_ratio, or "
                          "model.sidebands = three")
    phi = it.phi_int_rad + t2.phase_rad - t1.phase_rad
    return cp.ToneSet(a1, a2, d1, d2, phi)


def build_couplings(cfg):
    cav = build_cavity(cfg)
    tones = build_tones(cfg, cav)
    try:
        c = cp.coupling_strengths(cav, tones, cfg.model.include_kappa,
                                  cfg.model.sidebands == "three")
    except cp.CouplingError as exc:
        raise ConfigError("tones", str(exc)) from None
    if cfg.model.gamma_policy == "zeroed":
        c = cp.CouplingSet(c.chi_e, c.chi_p, 0.0, c.delta, c.phi_int)
    return cav, tones, c


def build_spec(cfg, couplings=None):
    """EOMSpec: resonant XYZ when delta = phi_int = 0, rotating otherwise.

    Any phase of chi_p left by a finite kappa is dropped on the resonant
    path (it only rotates the pair axes by arg(chi_p)/2, recorded in the
    coupling report).
    """
    c = couplings if couplings is not None else build_couplings(cfg)[2]
    if c.delta == 0 and c.phi_int == 0 and not cfg.model.linear_z:
        real = cp.CouplingSet(c.chi_e, complex(c.chi_p.real, 0.0), c.gamma_sr, 0.0, 0.0)
        return mf.EOMSpec(cp.xyz_from_couplings(real), c.gamma_sr)
    return mf.EOMSpec(None, c.gamma_sr,
                      time_dependent=mf.PairDrive.from_couplings(c, cfg.model.linear_z))


def flow_duration(cfg, spec):
    """Interaction time: the configured value, else twist * N * dt = 0.05."""
    if cfg.interaction.duration_s is not None:
        return cfg.interaction.duration_s
    rate = spec.rate_scale(cfg.atoms.n)
    if rate == 0:
        raise ConfigError("interaction.duration_s",
                          "no interaction strength to scale the duration by; set it")
    return DEFAULT_FLOW_STRENGTH / rate


def flow_grid(cfg):
    f = cfg.flowmap
    return mf.FlowGrid(f.projection, f.resolution, (f.center_theta_rad, f.center_phi_rad),
                       f.half_width_rad)
