"""Scenario runners and deterministic CSV/JSON writers.

Every runner takes a validated RunConfig and returns a ScenarioResult made
of tables (rows of floats) and reports (JSON-ready dicts).  Files carry
frequencies in Hz and angles in radians.
"""

import csv
from dataclasses import dataclass, field
import io
import json
import math
import os

import numpy as np

from . import config as cfgmod
from . import couplings as cp
from . import meanfield as mf
from . import sequence as sq
from . import spin

TWO_PI = 2 * math.pi

FLOW_COLUMNS = ("theta_i", "phi_i", "jx_i", "jy_i", "jz_i", "tx", "ty", "tz",
                "dtheta", "dphi")
FLOW_UNITS = "angles rad; J in spin units (|J| = N/2); torque in spin units per s"


@dataclass
class Table:
    columns: tuple
    rows: list
    units: str = ""

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("row length does not match columns")


@dataclass
class ScenarioResult:
    name: str
    tables: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)


class ScenarioError(RuntimeError):
    """A scenario could not be completed (e.g. a nonconvergent solve)."""


# -------------------------------------------------------------- serialization

def to_jsonable(obj):
    """Plain JSON types; complex numbers become {"re", "im"}."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        return v
    return obj


def dumps_json(obj):
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def table_csv(table):
    buf = io.StringIO()
    if table.units:
        buf.write(f"# {table.units}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def table_json(table):
    return {"columns": list(table.columns), "units": table.units,
            "rows": [list(r) for r in table.rows]}


def write_result(result, out_dir, fmt="csv"):
    """Write tables and reports to ``out_dir``; returns the file paths."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, table in result.tables.items():
        if fmt == "csv":
            path, text = os.path.join(out_dir, f"{name}.csv"), table_csv(table)
        else:
            path, text = os.path.join(out_dir, f"{name}.json"), dumps_json(table_json(table))
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        paths.append(path)
    for name, report in result.reports.items():
        path = os.path.join(out_dir, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps_json(report))
        paths.append(path)
    return paths


# ------------------------------------------------------------------ reports

def _hz(x):
    return x / TWO_PI


def couplings_report(cfg):
    cav, tones, c = cfgmod.build_couplings(cfg)
    spec = cfgmod.build_spec(cfg, c)
    rep = {
        "units": "frequencies Hz (angular / 2 pi); angles rad; amplitudes sqrt(photons)",
        "n_atoms": cfg.atoms.n,
        "tones": {"alpha1": tones.alpha1, "alpha2": tones.alpha2,
                  "amplitude_ratio": tones.amplitude_ratio,
                  "delta_c1_hz": _hz(tones.delta_c1), "delta_c2_hz": _hz(tones.delta_c2),
                  "delta_bar_hz": _hz(tones.delta_bar), "phi_int_rad": tones.phi_int},
        "couplings": {"chi_e_hz": _hz(c.chi_e), "chi_p_hz": c.chi_p / TWO_PI,
                      "chi_pair_hz": _hz(c.chi_pair), "gamma_sr_hz": _hz(c.gamma_sr),
                      "delta_hz": _hz(c.delta)},
        "resonant": spec.resonant,
    }
    if spec.resonant:
        x = spec.xyz
        rep["xyz"] = {"chi_x_hz": _hz(x.chi_x), "chi_y_hz": _hz(x.chi_y),
                      "chi_z_hz": _hz(x.chi_z), "casimir_gauge_hz": _hz(x.casimir_gauge)}
    rep["twist_strength_hz"] = _hz(spec.twist_strength)
    if cfg.model.sidebands == "three":
        rep["cancellation"] = {"amplitude_ratio": tones.amplitude_ratio,
                               "chi_e_over_chi_pair": (c.chi_e / c.chi_pair
                                                       if c.chi_pair else None)}
    return rep


def _fixed_point_entries(reports):
    out = []
    for r in reports:
        th, ph = r.location.angles
        out.append({"direction": r.location.direction, "theta": th, "phi": ph,
                    "classification": r.classification,
                    "eigenvalues_hz": [e / TWO_PI for e in r.eigenvalues],
                    "note": r.note})
    return out


def fixed_points_report(cfg, spec=None):
    """Fixed points of the Hamiltonian flow; when superradiance is on, the
    dissipatively shifted points are listed separately."""
    spec = spec or cfgmod.build_spec(cfg)
    if not spec.resonant:
        raise cfgmod.ConfigError("interaction", "fixed points need delta = 0 and "
                                 "phi_int = 0 (the rotating-axis flow has none)")
    conservative = mf.EOMSpec(spec.xyz, 0.0, spec.drive)
    out = {"units": "eigenvalues in Hz (rate / 2 pi); angles rad",
           "n_atoms": cfg.atoms.n}
    for key, s in (("fixed_points", conservative),
                   ("fixed_points_with_superradiance", spec)):
        if key != "fixed_points" and spec.gamma_sr == 0:
            continue
        reports = mf.fixed_points(s, cfg.atoms.n)
        counts = {}
        for r in reports:
            counts[r.classification] = counts.get(r.classification, 0) + 1
        out[key] = {"counts": counts, "points": _fixed_point_entries(reports)}
    out["gamma_sr_hz"] = _hz(spec.gamma_sr)
    return out


# ------------------------------------------------------------------- tables

def flow_table(samples):
    rows = [(s.theta_i, s.phi_i, *s.J_initial, *s.torque, s.dtheta, s.dphi)
            for s in samples]
    return Table(FLOW_COLUMNS, rows, FLOW_UNITS)


def _exact_flow(cfg, spec, grid, dt, seed):
    th, ph = grid.points()
    seeds = np.random.SeedSequence(seed).spawn(len(th)) if seed is not None else None
    out = []
    for i, (t, p) in enumerate(zip(th, ph)):
        if seeds is not None and abs(math.sin(t)) > 1e-6:
            s = sq.measure_flow(spec, t, p, dt, cfg.atoms.n, "sequence-emulated",
                                "exact", seed=seeds[i])
        else:
            s = sq.measure_flow(spec, t, p, dt, cfg.atoms.n, "direct", "exact")
        out.append(s)
    return out


def run_flowmap(cfg, spec=None, grid=None, seed=None):
    spec = spec or cfgmod.build_spec(cfg)
    grid = grid or cfgmod.flow_grid(cfg)
    dt = cfgmod.flow_duration(cfg, spec)
    if cfg.model.backend == "exact":
        samples = _exact_flow(cfg, spec, grid, dt, seed)
        if cfg.flowmap.subtract_superradiance:
            samples = mf.superradiance_subtract(samples, dt)
    else:
        samples = mf.flow_map(spec, grid, dt, cfg.atoms.n, cfg.model.tol,
                              cfg.flowmap.subtract_superradiance, cfg.model.workers)
    return samples, dt


def _spectroscopy_deltas(cfg, dt):
    s = cfg.spectroscopy
    if s.delta_min_hz is None or s.delta_max_hz is None:
        span = 40 / dt
        return np.linspace(-span, span, s.points)
    return TWO_PI * np.linspace(s.delta_min_hz, s.delta_max_hz, s.points)


def run_spectroscopy(cfg):
    """Rotating-axis scan over the four-photon detuning."""
    cav, tones, c = cfgmod.build_couplings(cfg)
    base = mf.EOMSpec(None, c.gamma_sr, time_dependent=mf.PairDrive.from_couplings(
        c, cfg.model.linear_z))
    resonant = mf.EOMSpec(None, c.gamma_sr, time_dependent=mf.PairDrive(
        c.chi_e, c.chi_pair_abs, 0.0))
    dt = cfgmod.flow_duration(cfg, resonant)
    deltas = _spectroscopy_deltas(cfg, dt)
    s = cfg.spectroscopy
    obs = s.observable
    rows = []
    wings = {}
    for th in s.theta_rad:
        res = sq.four_photon_scan(base, deltas, th, s.phi_rad, dt, cfg.atoms.n, obs,
                                  cfg.model.tol)
        rows += [(_hz(d), th, s.phi_rad, v) for d, v in res]
        vals = np.array([v for _, v in res])
        wing = np.abs(deltas) >= 0.75 * np.max(np.abs(deltas))
        wings[f"{th!r}"] = float(np.mean(vals[wing])) if wing.any() else None
    table = Table(("delta_hz", "theta_i", "phi_i", obs), rows,
                  "delta Hz; angles rad; djz in spin units")
    report = {"units": "Hz, rad, s", "duration_s": dt, "observable": obs,
              "wing_mean": wings}
    return table, report


def run_evolve(cfg):
    spec = cfgmod.build_spec(cfg)
    dt = cfgmod.flow_duration(cfg, spec)
    e = cfg.evolve
    times = np.linspace(0.0, dt, e.samples)
    if cfg.model.backend == "exact":
        state = sq.prepare_coherent(e.theta_rad, e.phi_rad, cfg.atoms.n, "exact")
        h = sq._hamiltonian(spec, state.basis)
        states = spin.evolve_unitary(h, state, times)
        means = np.array([spin.spin_moments(s).mean for s in states])
    else:
        j0 = sq.prepare_coherent(e.theta_rad, e.phi_rad, cfg.atoms.n).vector
        means = mf._run(spec, j0, dt, cfg.model.tol, times, None).states
    rows = [(t, *m) for t, m in zip(times, means)]
    return Table(("t_s", "jx", "jy", "jz"), rows, "time s; J in spin units")


def run_squeeze(cfg):
    """Exact OAT (chi Jz^2 from +x) versus TACT (chi (Jx^2 - Jz^2) from +y)."""
    q = cfg.squeeze
    basis = spin.DickeBasis(q.n)
    chi_t = np.linspace(0.0, q.chi_t_max, q.points)
    cases = {
        "oat": (cp.XYZCouplings(0.0, 0.0, 1.0), (math.pi / 2, 0.0)),
        "tact": (cp.XYZCouplings(1.0, 0.0, -1.0), (math.pi / 2, math.pi / 2)),
    }
    curves = {}
    for name, (xyz, (th, ph)) in cases.items():
        psi0 = spin.coherent_state(basis, th, ph)
        states = spin.evolve_unitary(spin.build_xyz_hamiltonian(xyz, basis), psi0, chi_t)
        xi = [spin.squeezing_parameter(s) for s in states]
        curves[name] = (np.array([x["xi2_kitagawa"] for x in xi]),
                        np.array([x["xi2_wineland"] for x in xi]))
    rows = [(t, curves["oat"][0][i], curves["oat"][1][i], curves["tact"][0][i],
             curves["tact"][1][i]) for i, t in enumerate(chi_t)]
    table = Table(("chi_t", "xi2_oat_ku", "xi2_oat_w", "xi2_tact_ku", "xi2_tact_w"),
                  rows, "time in units of 1/chi; squeezing parameters dimensionless")
    report = squeeze_summary(chi_t, curves["oat"][0], curves["tact"][0])
    report["n_atoms"] = q.n
    return table, report


def squeeze_summary(chi_t, oat, tact):
    i_oat = int(np.argmin(oat))
    i_tact = int(np.argmin(tact))
    target = 0.5 * oat[i_oat]
    below = np.flatnonzero(tact <= target)
    t_half = float(chi_t[below[0]]) if below.size else None
    return {"xi2_oat_min": float(oat[i_oat]), "chi_t_oat_opt": float(chi_t[i_oat]),
            "xi2_tact_min": float(tact[i_tact]), "chi_t_tact_opt": float(chi_t[i_tact]),
            "chi_t_tact_reaches_half_oat_min": t_half,
            "interior_oat_optimum": 0 < i_oat < len(oat) - 1}


def lmg_scan(n_atoms, chi=1.0, step=0.01):
    ratios = np.round(np.arange(step, 1.0, step), 10)
    rates = [mf.lmg_saddle_rate(chi, r * chi * n_atoms, n_atoms) for r in ratios]
    return ratios, np.array(rates)


def count_sign_changes(values, phis=None):
    """Sign changes of a periodic sequence (zeros are skipped)."""
    v = np.asarray(values, dtype=float)
    scale = np.max(np.abs(v)) if v.size else 0.0
    s = np.sign(np.where(np.abs(v) > 1e-9 * scale, v, 0.0))
    s = s[s != 0]
    if s.size < 2:
        return 0
    return int(np.sum(s != np.roll(s, 1)))


def equator_zero_crossings(spec, n_atoms, dt, n_points=72, tol=1e-10):
    ring = sq.ring_scan(spec, math.pi / 2, dt, n_points, n_atoms, tol)
    djz = [jf[2] for _, jf in ring]
    return count_sign_changes(djz), ring


# ---------------------------------------------------------------- scenarios

def _fig2(cfg, name):
    spec = cfgmod.build_spec(cfg)
    res = ScenarioResult(name)
    for proj in ("polar-south", "polar-north"):
        grid = mf.FlowGrid(proj, cfg.flowmap.resolution)
        samples, dt = run_flowmap(cfg, spec, grid)
        res.tables[f"{name}_{proj}"] = flow_table(samples)
    res.reports[f"{name}_couplings"] = couplings_report(cfg)
    res.reports[f"{name}_fixed_points"] = fixed_points_report(cfg, spec)
    return res


def _fig3(cfg):
    spec = cfgmod.build_spec(cfg)
    grid = mf.FlowGrid("saddle-window", cfg.flowmap.resolution,
                       (cfg.flowmap.center_theta_rad, cfg.flowmap.center_phi_rad),
                       cfg.flowmap.half_width_rad)
    samples, dt = run_flowmap(cfg, spec, grid)
    slopes = mf.saddle_slopes(samples, cfg.flowmap.resolution)
    lam = max(e.real for e in mf.jacobian_eigenvalues(
        mf.EOMSpec(spec.xyz), np.array([0.0, cfg.atoms.n / 2, 0.0])))
    res = ScenarioResult("fig3-saddle")
    res.tables["fig3-saddle_grid"] = flow_table(samples)
    res.reports["fig3-saddle_slopes"] = {
        "units": "slopes dimensionless (dJ per unit displacement)",
        "duration_s": dt, "slope_n_plus": slopes.get("n_plus"),
        "slope_n_minus": slopes.get("n_minus"),
        "expected_abs_slope": lam * dt,
        "subtracted": cfg.flowmap.subtract_superradiance,
    }
    return res


def _fig1e(cfg):
    table, report = run_spectroscopy(cfg)
    res = ScenarioResult("fig1e", {"fig1e_scan": table}, {"fig1e_summary": report})
    s = cfg.spectroscopy
    eq = cfgmod.from_dict(_replace_block(cfg, "spectroscopy", {
        "theta_rad": [math.pi / 2], "observable": "djz"}))
    rows = []
    for ph in (-math.pi / 4, 0.0, math.pi / 4):
        e2 = cfgmod.from_dict(_replace_block(eq, "spectroscopy", {"phi_rad": ph}))
        t, _ = run_spectroscopy(e2)
        rows += t.rows
    res.tables["fig1e_equator"] = Table(("delta_hz", "theta_i", "phi_i", "djz"), rows,
                                        "delta Hz; angles rad; djz in spin units")
    return res


def _replace_block(cfg, block, values):
    raw = cfg.model_dump(mode="json")
    raw[block].update(values)
    return raw


def _fig4(cfg):
    cav, tones, c = cfgmod.build_couplings(cfg)
    spec = cfgmod.build_spec(cfg, c)
    res = ScenarioResult("fig4-hprime")
    samples, dt = run_flowmap(cfg, spec)
    res.tables["fig4-hprime_flow"] = flow_table(samples)
    rows = []
    for th in cfg.ring.theta_rad:
        for ph, jf in sq.ring_scan(spec, th, dt, cfg.ring.points, cfg.atoms.n, cfg.model.tol):
            rows.append((th, ph, *jf))
    res.tables["fig4-hprime_rings"] = Table(("theta_i", "phi_i", "jx_f", "jy_f", "jz_f"),
                                            rows, "angles rad; J in spin units")
    crossings, _ = equator_zero_crossings(spec, cfg.atoms.n, dt, cfg.ring.points,
                                          cfg.model.tol)
    rep = couplings_report(cfg)
    rep["equator_djz_zero_crossings"] = crossings
    rep["duration_s"] = dt
    res.reports["fig4-hprime_summary"] = rep
    res.reports["fig4-hprime_fixed_points"] = fixed_points_report(cfg, spec)
    return res


def _stability(cfg):
    res = ScenarioResult("stability")
    spec = cfgmod.build_spec(cfg)
    if spec.resonant:
        res.reports["stability_fixed_points"] = fixed_points_report(cfg, spec)
    ratios, rates = lmg_scan(cfg.atoms.n)
    n = cfg.atoms.n
    res.tables["stability_lmg"] = Table(
        ("delta_over_chi_n", "rate_over_chi_n"),
        [(r, v / n) for r, v in zip(ratios, rates)], "dimensionless")
    i = int(np.argmax(rates))
    res.reports["stability_lmg_summary"] = {
        "units": "dimensionless (rates in units of chi N)",
        "argmax_delta_over_chi_n": float(ratios[i]),
        "max_rate_over_chi_n": float(rates[i] / n)}
    return res


def _squeeze(cfg):
    table, report = run_squeeze(cfg)
    return ScenarioResult("squeeze", {"squeeze_curves": table}, {"squeeze_summary": report})


SCENARIOS = ("fig1e", "fig2-oatz", "fig2-tact", "fig2-oatx", "fig3-saddle",
             "fig4-hprime", "stability", "squeeze")


def run_scenario(name, cfg):
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    if name.startswith("fig2"):
        return _fig2(cfg, name)
    return {"fig1e": _fig1e, "fig3-saddle": _fig3, "fig4-hprime": _fig4,
            "stability": _stability, "squeeze": _squeeze}[name](cfg)


def scenario_config(name, raw=None, environ=None):
    """Config for a scenario: the scenario's preset applies unless the file
    names one itself."""
    raw = dict(raw or {})
    if name in cfgmod.PRESETS and raw.get("preset") is None:
        raw["preset"] = name
    raw = cfgmod._merge(raw, cfgmod.env_overrides(environ))
    return cfgmod.from_dict(raw)
