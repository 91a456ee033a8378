"""Command-line entry point.

Subcommands: besov, construct, solve, experiment, all.  Exit codes: 0 when
everything ran and all verdicts pass, 1 when a verdict fails, 2 for usage
or configuration errors.  Every behavior here is a thin shell over the
library; the persisted JSON echoes the effective configuration so a run
can be reproduced from its summary alone.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys

from .constructions import construction_set
from .evolution import (
    export_trajectory_csv,
    load_field,
    save_field,
    save_trajectory,
    solve,
)
from .experiments import EXPERIMENTS, ExperimentConfig, persist, run_experiment
from .littlewood_paley import BesovParams, besov_norm

_CONFIG_KEYS = {
    "L": float,
    "N": int,
    "s": float,
    "p": float,
    "r": float,
    "n-min": int,
    "n-max": int,
    "T": float,
    "dt": float,
    "seed": int,
    "trials": int,
    "out": str,
}

_FLAG_TO_CONFIG = {
    "L": "L",
    "N": "N",
    "s": "s",
    "p": "p",
    "r": "r",
    "n_min": "n-min",
    "n_max": "n-max",
    "T": "T",
    "dt": "dt",
    "seed": "seed",
    "trials": "trials",
    "out": "out",
}


class ConfigError(Exception):
    pass


def _parse_config_file(path: str, section: str) -> dict:
    """key = value lines under [common] plus an optional per-command section."""
    parser = configparser.ConfigParser(default_section="common")
    parser.optionxform = str  # keys are case sensitive (L vs l)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}")
    merged: dict = {}
    sections = ["common"] + ([section] if parser.has_section(section) else [])
    for sec in sections:
        for key, raw in parser.items(sec):
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r} in [{sec}]")
            try:
                merged[key] = _CONFIG_KEYS[key](raw)
            except ValueError:
                raise ConfigError(f"bad value for {key!r}: {raw!r}")
    return merged


def _effective_settings(args, section: str) -> dict:
    settings: dict = {}
    if getattr(args, "config", None):
        settings.update(_parse_config_file(args.config, section))
    for flag, key in _FLAG_TO_CONFIG.items():
        value = getattr(args, flag, None)
        if value is not None:
            settings[key] = value
    return settings


def _experiment_config(settings: dict) -> ExperimentConfig:
    kwargs = {}
    rename = {"n-min": "n_min", "n-max": "n_max"}
    for key, value in settings.items():
        if key == "out":
            continue
        kwargs[rename.get(key, key)] = value
    return ExperimentConfig(**kwargs)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chlab",
        description="Numerical laboratory for the Camassa-Holm flow in Besov spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--L", type=float, help="domain half-length")
        p.add_argument("--N", type=int, help="grid points (even)")
        p.add_argument("--s", type=float, help="Besov regularity")
        p.add_argument("--p", type=float, help="Besov integrability")
        p.add_argument("--r", type=float, help="Besov summability")
        p.add_argument("--n-min", type=int, dest="n_min")
        p.add_argument("--n-max", type=int, dest="n_max")
        p.add_argument("--T", type=float, help="time horizon")
        p.add_argument("--dt", type=float, help="nominal RK4 step")
        p.add_argument("--seed", type=int, help="seed for randomized probes")
        p.add_argument("--trials", type=int, help="random probe count")
        p.add_argument("--out", type=str, help="output directory")
        p.add_argument("--config", type=str, help="key = value config file")

    p_besov = sub.add_parser("besov", help="Besov norm of a stored field")
    p_besov.add_argument("--input", required=True, help="snapshot file (.bin)")
    add_common(p_besov)

    p_con = sub.add_parser("construct", help="build and store the two-scale datum")
    p_con.add_argument("--n", type=int, required=True, help="dyadic index")
    add_common(p_con)

    p_solve = sub.add_parser("solve", help="integrate an equation from a stored field")
    p_solve.add_argument("--input", required=True, help="initial datum (.bin)")
    p_solve.add_argument("--equation", choices=("ch", "dp"), default="ch")
    p_solve.add_argument("--csv", action="store_true", help="also export CSV snapshots")
    add_common(p_solve)

    p_exp = sub.add_parser("experiment", help="run one named experiment")
    p_exp.add_argument("name", choices=sorted(EXPERIMENTS), metavar="name")
    add_common(p_exp)

    p_all = sub.add_parser("all", help="run every experiment")
    add_common(p_all)
    return parser


def _cmd_besov(args) -> int:
    settings = _effective_settings(args, "besov")
    u = load_field(args.input)
    params = BesovParams(
        settings.get("s", 2.0), settings.get("p", 2.0), settings.get("r", 2.0)
    )
    print(besov_norm(u, params))
    return 0


def _cmd_construct(args) -> int:
    settings = _effective_settings(args, "construct")
    cfg = _experiment_config(settings)
    out = settings.get("out", ".")
    os.makedirs(out, exist_ok=True)
    cs = construction_set(args.n, cfg.params, cfg.grid)
    for label, field in (
        ("u0", cs.u0),
        ("wave", cs.high),
        ("low", cs.low),
        ("tangent", cs.v0),
    ):
        path = os.path.join(out, f"{label}_n{args.n}.bin")
        save_field(field, path)
        print(f"{path}  besov={besov_norm(field, cfg.params)}")
    return 0


def _cmd_solve(args) -> int:
    settings = _effective_settings(args, "solve")
    cfg = _experiment_config(settings)
    out = settings.get("out", ".")
    os.makedirs(out, exist_ok=True)
    u0 = load_field(args.input)
    traj = solve(u0, cfg.solver, args.equation)
    base = os.path.join(
        out, os.path.splitext(os.path.basename(args.input))[0]
    )
    bin_path = f"{base}_{args.equation}_traj.bin"
    save_trajectory(traj, bin_path)
    print(bin_path)
    if args.csv:
        csv_path = f"{base}_{args.equation}_traj.csv"
        export_trajectory_csv(traj, csv_path)
        print(csv_path)
    return 0


def _run_and_report(name: str, cfg: ExperimentConfig, out: str) -> bool:
    result = run_experiment(name, cfg)
    csv_path, json_path = persist(result, out)
    emit_plotdata(result, out)
    for verdict, status in sorted(result.verdicts.items()):
        print(f"[{result.name}] {verdict}: {status}")
    print(f"[{result.name}] wrote {csv_path} and {json_path}")
    return result.passed


def _cmd_experiment(args) -> int:
    settings = _effective_settings(args, args.name)
    cfg = _experiment_config(settings)
    out = settings.get("out", "results")
    ok = _run_and_report(args.name, cfg, out)
    return 0 if ok else 1


def _cmd_all(args) -> int:
    settings = _effective_settings(args, "all")
    cfg = _experiment_config(settings)
    out = settings.get("out", "results")
    ok = True
    for name in EXPERIMENTS:
        section_settings = dict(settings)
        if getattr(args, "config", None):
            section_settings.update(_parse_config_file(args.config, name))
        ok &= _run_and_report(name, _experiment_config(section_settings), out)
    return 0 if ok else 1


def emit_plotdata(result, out_dir) -> list:
    """Whitespace-separated plot files, one per figure-equivalent."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def write(name: str, header: str, rows) -> None:
        rows = list(rows)
        if not rows:
            return
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="") as fh:
            fh.write(f"# {header}\n")
            for row in rows:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        written.append(path)

    def series(norm_name: str):
        by_n: dict = {}
        for _, n, t, name, value in result.records:
            if name == norm_name and t is not None:
                by_n.setdefault(n, []).append((t, value))
        return by_n

    if result.name in ("main", "dp"):
        c0 = result.constants.get("c0", 0.0)
        for n, rows in sorted(series("separation_distance").items()):
            if n == result.config.get("n_max"):
                write(
                    f"{result.name}_distance_n{n}.txt",
                    "t distance c0_reference",
                    [(t, v, c0 * t) for t, v in rows],
                )
            else:
                write(f"{result.name}_distance_n{n}.txt", "t distance", rows)
    elif result.name == "scaling":
        for fit_name, fit in sorted(result.fits.items()):
            norm_name = f"besov_{fit_name}"
            rows = [
                (n, v, 2.0 ** (fit.intercept + fit.slope * n))
                for _, n, _, name, v in result.records
                if name == norm_name
            ]
            write(f"scaling_{fit_name}.txt", "n value fit", rows)
    elif result.name == "prop1":
        sup_by_n: dict = {}
        for n, rows in series("flow_distance").items():
            sup_by_n[n] = max(v for t, v in rows if t > 0)
        fit = result.fits.get("flow_distance")
        write(
            "prop1_flow_distance.txt",
            "n sup_distance fit",
            [
                (n, v, 2.0 ** (fit.intercept + fit.slope * n))
                for n, v in sorted(sup_by_n.items())
            ],
        )
    elif result.name == "prop2":
        for n, rows in sorted(series(f"remainder_sigma_{result.config['s']:g}").items()):
            write(f"prop2_remainder_n{n}.txt", "t remainder", rows)
    return written


_COMMANDS = {
    "besov": _cmd_besov,
    "construct": _cmd_construct,
    "solve": _cmd_solve,
    "experiment": _cmd_experiment,
    "all": _cmd_all,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
