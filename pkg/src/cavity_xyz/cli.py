"""Command-line entry point (``cavity-xyz``)."""

import argparse
import json
import sys

from . import config as cfgmod
from . import meanfield as mf
from . import scenarios as sc


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (frequencies in Hz)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="table format; reports are always JSON")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for projection-noise readout (exact backend)")

    p = argparse.ArgumentParser(
        prog="cavity-xyz",
        description="Cavity-mediated XYZ spin models: couplings, mean-field flows, "
                    "fixed points and exact squeezing.  Config keys can be "
                    "overridden with CXYZ_<PATH> environment variables, e.g. "
                    "CXYZ_CAVITY__KAPPA_HZ=60e3.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("couplings", "effective couplings report"),
            ("flowmap", "flow vectors on the configured grid"),
            ("fixed-points", "fixed points and their stability"),
            ("spectroscopy", "four-photon detuning scan"),
            ("evolve", "trajectory of one coherent state"),
            ("squeeze", "exact OAT vs TACT squeezing curves")):
        sub.add_parser(name, parents=[common], help=helptext)
    s = sub.add_parser("scenario", parents=[common], help="reproduce a figure scenario")
    s.add_argument("name", choices=sc.SCENARIOS)
    return p


def _load_raw(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        text = fh.read().strip()
    if not text:
        return {}
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise cfgmod.ConfigError("", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise cfgmod.ConfigError("", "top level must be an object")
    return raw


def _run(args):
    raw = _load_raw(args.config)
    if args.command == "scenario":
        cfg = sc.scenario_config(args.name, raw)
        return sc.run_scenario(args.name, cfg)
    cfg = cfgmod.from_dict(cfgmod._merge(raw, cfgmod.env_overrides()))
    cmd = args.command
    res = sc.ScenarioResult(cmd)
    if cmd == "couplings":
        res.reports["couplings"] = sc.couplings_report(cfg)
    elif cmd == "flowmap":
        samples, dt = sc.run_flowmap(cfg, seed=args.seed)
        res.tables["flowmap"] = sc.flow_table(samples)
    elif cmd == "fixed-points":
        res.reports["fixed_points"] = sc.fixed_points_report(cfg)
    elif cmd == "spectroscopy":
        table, report = sc.run_spectroscopy(cfg)
        res.tables["spectroscopy"] = table
        res.reports["spectroscopy_summary"] = report
    elif cmd == "evolve":
        res.tables["trajectory"] = sc.run_evolve(cfg)
    elif cmd == "squeeze":
        table, report = sc.run_squeeze(cfg)
        res.tables["squeeze_curves"] = table
        res.reports["squeeze_summary"] = report
    return res


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        result = _run(args)
        paths = sc.write_result(result, args.out, args.format)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (mf.IntegrationError, sc.ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
