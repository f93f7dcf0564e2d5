import csv
import json
import math
import os

import numpy as np
import pytest

from cavity_xyz import cli
from cavity_xyz import config as cfgmod
from cavity_xyz import couplings as cp
from cavity_xyz import meanfield as mf
from cavity_xyz import scenarios as sc


# ------------------------------------------------------------------ config

def test_defaults():
    cfg = cfgmod.parse_config("", environ={})
    assert cfg.atoms.n == 700
    assert cfg.cavity.kappa_hz == 56e3
    assert cfg.interaction.amplitude_ratio == cp.TACT_RATIO
    assert cfg.interaction.duration_s is None
    assert cfg.model.backend == "meanfield"


@pytest.mark.parametrize("text, path", [
    ('{"cavity": {"kappa_hz": -1}}', "cavity.kappa_hz"),
    ('{"cavity": {"delta_a_hz": 0}}', "cavity.delta_a_hz"),
    ('{"atoms": {"n": 0}}', "atoms.n"),
    ('{"model": {"tol": 1e-3}}', "model.tol"),
    ('{"model": {"backend": "tensor"}}', "model.backend"),
    ('{"cavity": {"finesse": 3}}', "cavity.finesse"),
    ('{"tones": [{"amplitude_sqrtphotons": null}, {}]}', "tones.0.amplitude_sqrtphotons"),
    ('{"preset": "fig9"}', "preset"),
])
def test_invalid_values_name_their_path(text, path):
    with pytest.raises(cfgmod.ConfigError) as info:
        cfgmod.parse_config(text, environ={})
    assert info.value.path == path


def test_nan_rejected():
    with pytest.raises(cfgmod.ConfigError, match="finite"):
        cfgmod.from_dict({"interaction": {"delta_hz": float("nan")}})
    with pytest.raises(cfgmod.ConfigError, match="g0_hz"):
        cfgmod.from_dict({"cavity": {"g0_hz": float("nan")}})


def test_malformed_json():
    with pytest.raises(cfgmod.ConfigError, match="invalid JSON"):
        cfgmod.parse_config("{", environ={})
    with pytest.raises(cfgmod.ConfigError, match="object"):
        cfgmod.parse_config("[1]", environ={})


def test_preset_then_file_precedence():
    cfg = cfgmod.from_dict({"preset": "fig1e", "interaction": {"delta_hz": 3.0}})
    assert cfg.interaction.amplitude_ratio == 1.0
    assert cfg.interaction.delta_hz == 3.0
    cfg = cfgmod.from_dict({"preset": "fig1e", "interaction": {"amplitude_ratio": 0.5}})
    assert cfg.interaction.amplitude_ratio == 0.5


def test_env_overrides():
    env = {"CXYZ_CAVITY__KAPPA_HZ": "60e3", "CXYZ_TONES__1__DETUNING_HZ": "-210000",
           "CXYZ_MODEL__BACKEND": "exact", "OTHER": "1", "CXYZ_PURE_PYTHON": "1"}
    assert cfgmod.env_overrides(env) == {
        "cavity": {"kappa_hz": 60e3}, "model": {"backend": "exact"},
        "tones": [{}, {"detuning_hz": -210000}]}
    cfg = cfgmod.parse_config('{"cavity": {"kappa_hz": 10e3}}', environ=env)
    assert cfg.cavity.kappa_hz == 60e3
    assert cfg.tones[1].detuning_hz == -210000
    assert cfg.tones[0].amplitude_sqrtphotons == 7.4
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.env_overrides({"CXYZ_CAVITY____KAPPA": "1"})


def test_build_tones_from_ratio_and_cancellation():
    cfg = cfgmod.from_dict({})
    tones = cfgmod.build_tones(cfg)
    assert tones.amplitude_ratio == pytest.approx(cp.TACT_RATIO)
    assert tones.delta_c1 == pytest.approx(2 * math.pi * -200e3)
    cfg = cfgmod.from_dict({"preset": "fig4-hprime"})
    cav, tones, c = cfgmod.build_couplings(cfg)
    assert abs(c.chi_e) < 1e-10 * abs(c.chi_pair)


def test_cancellation_failure_is_config_error():
    raw = {"preset": "fig4-hprime", "tones": [{"detuning_hz": 200e3}, {"detuning_hz": 200e3}]}
    with pytest.raises(cfgmod.ConfigError, match="omega_z"):
        cfgmod.build_tones(cfgmod.from_dict(raw))


def test_build_spec_kinds():
    assert cfgmod.build_spec(cfgmod.from_dict({})).resonant
    spec = cfgmod.build_spec(cfgmod.from_dict({"interaction": {"delta_hz": 50.0}}))
    assert not spec.resonant
    assert spec.time_dependent.delta == pytest.approx(2 * math.pi * 50.0)
    zeroed = cfgmod.build_spec(cfgmod.from_dict({"model": {"gamma_policy": "zeroed"}}))
    assert zeroed.gamma_sr == 0


def test_auto_duration_sets_flow_strength():
    cfg = cfgmod.from_dict({"preset": "fig2-tact"})
    spec = cfgmod.build_spec(cfg)
    dt = cfgmod.flow_duration(cfg, spec)
    assert spec.rate_scale(cfg.atoms.n) * dt == pytest.approx(cfgmod.DEFAULT_FLOW_STRENGTH)
    fixed = cfgmod.from_dict({"interaction": {"duration_s": 1e-6}})
    assert cfgmod.flow_duration(fixed, spec) == 1e-6


# ----------------------------------------------------------------- reports

def _census(report, key="fixed_points"):
    out = {}
    for p in report[key]["points"]:
        out[tuple(np.round(p["direction"], 6) + 0.0)] = p["classification"]
    return out


def test_tact_preset_census():
    rep = sc.fixed_points_report(cfgmod.from_dict({"preset": "fig2-tact"}))
    census = _census(rep)
    assert rep["fixed_points"]["counts"] == {"stable-center": 4, "saddle": 2}
    assert census[(0, 1, 0)] == census[(0, -1, 0)] == "saddle"
    assert "fixed_points_with_superradiance" in rep


def test_hprime_preset_census():
    rep = sc.fixed_points_report(cfgmod.from_dict({"preset": "fig4-hprime"}))
    census = _census(rep)
    assert census[(0, 0, 1)] == census[(0, 0, -1)] == "saddle"
    assert rep["fixed_points"]["counts"]["stable-center"] == 4


def test_fixed_points_need_resonant_config():
    with pytest.raises(cfgmod.ConfigError):
        sc.fixed_points_report(cfgmod.from_dict({"interaction": {"delta_hz": 5.0}}))


def test_json_roundtrip_of_complex_values():
    text = sc.dumps_json({"z": 1 + 2j, "a": np.arange(2), "x": math.inf})
    assert json.loads(text) == {"z": {"re": 1.0, "im": 2.0}, "a": [0, 1], "x": None}


def test_table_csv_layout():
    t = sc.Table(("a", "b"), [(1, 0.1)], "units here")
    assert sc.table_csv(t) == "# units here\na,b\n1,0.1\n"
    with pytest.raises(ValueError):
        sc.Table(("a",), [(1, 2)])


def test_unknown_scenario():
    with pytest.raises(ValueError, match="unknown scenario"):
        sc.run_scenario("fig7", cfgmod.from_dict({}))


def test_count_sign_changes():
    assert sc.count_sign_changes([1, -1, 1, -1]) == 4
    assert sc.count_sign_changes([0.0, 1, 1, -1, -1, 0.0]) == 2
    assert sc.count_sign_changes([0.0, 0.0]) == 0


# --------------------------------------------------------------------- CLI

def _run(tmp_path, *args):
    out = tmp_path / "out"
    code = cli.main([*args, "--out", str(out)])
    return code, out


def _read_csv(path):
    with open(path) as fh:
        lines = [l for l in fh if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_cli_couplings(tmp_path, capsys):
    code, out = _run(tmp_path, "couplings")
    assert code == 0
    rep = json.loads((out / "couplings.json").read_text())
    assert rep["xyz"]["chi_x_hz"] == pytest.approx(2 * rep["xyz"]["chi_y_hz"], rel=1e-9)
    assert str(out / "couplings.json") in capsys.readouterr().out


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"cavity": {"kappa_hz": -1}}')
    code, _ = _run(tmp_path, "couplings", "--config", str(cfg))
    assert code == 2
    assert "cavity.kappa_hz" in capsys.readouterr().err


def test_cli_runtime_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"interaction": {"duration_s": 1.0}}')
    code, _ = _run(tmp_path, "flowmap", "--config", str(cfg))
    assert code == 1
    assert "0.5" in capsys.readouterr().err


def test_cli_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("CXYZ_ATOMS__N", "100")
    code, out = _run(tmp_path, "couplings")
    assert code == 0
    assert json.loads((out / "couplings.json").read_text())["n_atoms"] == 100


def test_cli_flowmap_json_format(tmp_path):
    code, out = _run(tmp_path, "flowmap", "--format", "json")
    assert code == 0
    data = json.loads((out / "flowmap.json").read_text())
    assert data["columns"] == list(sc.FLOW_COLUMNS)
    assert len(data["rows"]) == 121


@pytest.mark.parametrize("command, files", [
    ("fixed-points", ["fixed_points.json"]),
    ("evolve", ["trajectory.csv"]),
])
def test_cli_subcommands(tmp_path, command, files):
    code, out = _run(tmp_path, command)
    assert code == 0
    for f in files:
        assert (out / f).exists()


def test_cli_spectroscopy(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"preset": "fig1e", "spectroscopy": {"points": 9}}')
    code, out = _run(tmp_path, "spectroscopy", "--config", str(cfg))
    assert code == 0
    rows = _read_csv(out / "spectroscopy.csv")
    assert len(rows) == 18
    rep = json.loads((out / "spectroscopy_summary.json").read_text())
    lo, hi = rep["wing_mean"].values()
    assert lo * hi < 0


def test_cli_squeeze(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"squeeze": {"n": 30, "points": 41}}')
    code, out = _run(tmp_path, "squeeze", "--config", str(cfg))
    assert code == 0
    rows = _read_csv(out / "squeeze_curves.csv")
    assert len(rows) == 41
    assert float(rows[0]["xi2_oat_ku"]) == pytest.approx(1.0, abs=1e-9)
    rep = json.loads((out / "squeeze_summary.json").read_text())
    assert rep["xi2_tact_min"] < rep["xi2_oat_min"]


def test_cli_exact_flowmap_is_seeded(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"atoms": {"n": 12}, "model": {"backend": "exact",
                               "gamma_policy": "zeroed"}, "flowmap": {"resolution": 3}}))
    outs = []
    for i, seed in enumerate(("5", "5", "6")):
        out = tmp_path / f"o{i}"
        assert cli.main(["flowmap", "--config", str(cfg), "--seed", seed,
                         "--out", str(out)]) == 0
        outs.append((out / "flowmap.csv").read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] != outs[2]


def test_scenario_fig3_rows_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["scenario", "fig3-saddle", "--out", str(a)]) == 0
    assert cli.main(["scenario", "fig3-saddle", "--out", str(b)]) == 0
    for name in ("fig3-saddle_grid.csv", "fig3-saddle_slopes.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert len(_read_csv(a / "fig3-saddle_grid.csv")) == 121
    rep = json.loads((a / "fig3-saddle_slopes.json").read_text())
    assert rep["slope_n_plus"] * rep["slope_n_minus"] < 0


def test_scenario_fig2_tact(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["scenario", "fig2-tact", "--out", str(out)]) == 0
    rep = json.loads((out / "fig2-tact_fixed_points.json").read_text())
    assert rep["fixed_points"]["counts"] == {"stable-center": 4, "saddle": 2}
    assert (out / "fig2-tact_polar-south.csv").exists()


def test_scenario_stability(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["scenario", "stability", "--out", str(out)]) == 0
    rep = json.loads((out / "stability_lmg_summary.json").read_text())
    assert rep["argmax_delta_over_chi_n"] == pytest.approx(0.5)


def test_scenario_config_respects_file_preset():
    cfg = sc.scenario_config("fig2-tact", {"preset": "fig1e"}, environ={})
    assert cfg.preset == "fig1e"
    cfg = sc.scenario_config("fig2-tact", {}, environ={"CXYZ_ATOMS__N": "50"})
    assert cfg.preset == "fig2-tact" and cfg.atoms.n == 50


def test_cli_rejects_unknown_scenario(capsys):
    with pytest.raises(SystemExit):
        cli.main(["scenario", "fig9"])
