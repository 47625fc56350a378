"""Config-driven command line entry point.

Five subcommands: simulate, check, rate, ip, sweep. Each takes a JSON config
(--config file and/or --preset name, plus --set path.to.key=value overrides),
validates it strictly (unknown keys are errors), writes its artifacts into an
output directory, and reports through exit codes:

    0 ok / satisfied / bounded      2 config error
    3 early stop                    4 violated / growing
    5 boundary verdict              6 missing input file

Every run writes summary.json, including failure paths. The environment
variable INERTIA_LAB_SEED is reserved for future stochastic features and is
currently unused.
"""

import argparse
import copy
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import algorithms as alg
from . import analysis as ana
from . import certificates as certs
from . import schedules as sch
from .dynamics import DynamicsSpec, IntegratorConfig, integrate
from .errors import ConfigError, InertiaLabError
from .presets import PRESETS, get_preset
from .problems import objective_from_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EARLY = 3
EXIT_VIOLATED = 4
EXIT_BOUNDARY = 5
EXIT_MISSING = 6


def _check_keys(cfg, where, required, optional=()):
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where} must be a JSON object")
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ConfigError(f"{where} is missing required keys {missing}")
    unknown = sorted(set(cfg) - set(required) - set(optional))
    if unknown:
        raise ConfigError(f"{where} has unknown keys {unknown}")


def _deep_merge(base, override):
    if not isinstance(base, dict) or not isinstance(override, dict):
        return copy.deepcopy(override)
    out = copy.deepcopy(base)
    for k, v in override.items():
        out[k] = _deep_merge(out[k], v) if k in out else copy.deepcopy(v)
    return out


def _apply_set(cfg, path, value):
    segs = path.split(".")
    node = cfg
    for s in segs[:-1]:
        if isinstance(node, list):
            node = node[int(s)]
        elif isinstance(node, dict):
            if s not in node:
                raise ConfigError(f"--set path {path!r}: no such key {s!r}")
            node = node[s]
        else:
            raise ConfigError(f"--set path {path!r}: {s!r} is not a container")
    last = segs[-1]
    if isinstance(node, list):
        node[int(last)] = value
    elif isinstance(node, dict):
        node[last] = value
    else:
        raise ConfigError(f"--set path {path!r} does not reach a container")


def _parse_set_item(item):
    if "=" not in item:
        raise ConfigError(f"--set needs PATH=VALUE, got {item!r}")
    path, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def _write_json(path, payload):
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- config assembly -----------------------------------------------------------

def _resolve_preset_key(data, command):
    """Deep-merge the preset named by a "preset" key under the dict's own keys."""
    if "preset" not in data:
        return data
    name = data.pop("preset")
    pcmd, base = get_preset(name) if name in PRESETS else (None, None)
    if base is None:
        raise ConfigError(f"unknown preset {name!r} in config")
    if pcmd != command:
        raise ConfigError(
            f"preset {name!r} belongs to command {pcmd!r}, not {command!r}")
    return _deep_merge(base, data)


def _load_config(args, command):
    cfg = None
    if args.preset:
        try:
            pcmd, cfg = get_preset(args.preset)
        except KeyError:
            known = ", ".join(sorted(PRESETS))
            raise ConfigError(f"unknown preset {args.preset!r}; known: {known}")
        if pcmd != command:
            raise ConfigError(
                f"preset {args.preset!r} belongs to command {pcmd!r}, not {command!r}")
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(str(path))
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {path} is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        data = _resolve_preset_key(data, command)
        cfg = data if cfg is None else _deep_merge(cfg, data)
    if cfg is None:
        raise ConfigError("provide --config FILE and/or --preset NAME")
    for item in args.set or []:
        path, value = _parse_set_item(item)
        _apply_set(cfg, path, value)
    return cfg


_INTEGRATOR_KEYS = ("rtol", "atol", "hmin", "hmax", "max_steps",
                    "checkpoints_per_decade", "backend")


def _build_integrator(cfg):
    if cfg is None:
        return IntegratorConfig()
    _check_keys(cfg, "integrator", (), _INTEGRATOR_KEYS)
    kw = dict(cfg)
    if kw.get("hmax") in ("inf", None):
        kw.pop("hmax", None)
    return IntegratorConfig(**kw)


def _build_certificate(cert_cfg, gamma, beta, b, t0):
    """Returns (certificate, gamma actually governing the dynamic)."""
    if cert_cfg is None:
        return None, gamma
    _check_keys(cert_cfg, "certificate", ("recipe",), ("r", "m"))
    recipe = cert_cfg["recipe"]
    if recipe in ("gamma", "gamma-hessian"):
        return certs.derive_gamma_certificate(gamma, beta, b, t0), gamma
    if recipe == "p-model":
        if not sch.schedule_is_zero(beta):
            raise ConfigError("the p-model recipe requires beta = 0")
        cert = certs.derive_model_certificate(gamma, b, t0)
        return cert, cert.gamma          # config gamma is gamma0 for this recipe
    if recipe == "p-general":
        if "r" not in cert_cfg or "m" not in cert_cfg:
            raise ConfigError("the p-general recipe needs keys 'r' and 'm'")
        cert = certs.derive_p_certificate(gamma, beta, b,
                                          cert_cfg["r"], cert_cfg["m"], t0)
        return cert, gamma
    raise ConfigError(f"unknown certificate recipe {recipe!r}; known: "
                      "gamma, gamma-hessian, p-model, p-general")


_RUN_KEYS_REQ = ("objective", "gamma", "beta", "b", "t0", "horizon", "x0", "v0")
_RUN_KEYS_OPT = ("certificate", "integrator", "label")


def _run_simulation(run_cfg, outdir, csv_name):
    _check_keys(run_cfg, "simulate run", _RUN_KEYS_REQ, _RUN_KEYS_OPT)
    obj = objective_from_config(run_cfg["objective"])
    gamma = sch.from_config(run_cfg["gamma"])
    beta = sch.from_config(run_cfg["beta"])
    b = sch.from_config(run_cfg["b"])
    t0 = float(run_cfg["t0"])
    horizon = float(run_cfg["horizon"])
    cert, gamma = _build_certificate(run_cfg.get("certificate"), gamma, beta, b, t0)
    icfg = _build_integrator(run_cfg.get("integrator"))
    spec = DynamicsSpec(gamma, beta, b, t0)
    traj = integrate(spec, obj, np.asarray(run_cfg["x0"], dtype=float),
                     np.asarray(run_cfg["v0"], dtype=float), horizon, icfg,
                     cert=cert)
    traj.to_csv(outdir / csv_name)
    summary = traj.summary()
    summary["csv"] = csv_name
    summary["label"] = run_cfg.get("label", "run")
    summary["objective"] = obj.name
    try:
        summary["oscillation_count"] = ana.oscillation_count(traj)
    except InertiaLabError:
        pass
    return traj, summary


def _write_plot_script(outdir, runs):
    lines = [
        'set datafile separator ","',
        "set logscale y",
        'set xlabel "t"',
        'set ylabel "f(x(t)) - min f"',
        "set key outside",
    ]
    entries = []
    for r in runs:
        col = 2 * r["dim"] + 2          # fgap column, 1-based
        entries.append(f'  "{r["csv"]}" using 1:{col} with lines title "{r["label"]}"')
    lines.append("plot \\")
    lines.append(", \\\n".join(entries))
    with open(outdir / "plot.gp", "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_simulate(cfg, outdir):
    if "runs" in cfg:
        _check_keys(cfg, "simulate config", ("runs",), ("plot", "out"))
        run_cfgs = cfg["runs"]
        if not isinstance(run_cfgs, list) or not run_cfgs:
            raise ConfigError("'runs' must be a non-empty list")
    else:
        allowed = _RUN_KEYS_REQ + _RUN_KEYS_OPT + ("plot", "out")
        _check_keys(cfg, "simulate config", _RUN_KEYS_REQ,
                    _RUN_KEYS_OPT + ("plot", "out"))
        del allowed
        run_cfgs = [ {k: v for k, v in cfg.items() if k not in ("plot", "out")} ]

    summaries = []
    plot_entries = []
    multi = len(run_cfgs) > 1
    for i, rc in enumerate(run_cfgs):
        label = rc.get("label", f"run{i:02d}" if multi else "run")
        csv_name = f"trajectory_{label}.csv" if multi else "trajectory.csv"
        traj, summary = _run_simulation(rc, outdir, csv_name)
        summaries.append(summary)
        plot_entries.append({"csv": csv_name, "label": label, "dim": traj.dim})
    if cfg.get("plot"):
        _write_plot_script(outdir, plot_entries)

    all_ok = all(s["status"] == "completed" for s in summaries)
    payload = {"status": "completed" if all_ok else "early_stop",
               "runs": summaries}
    _write_json(outdir / "summary.json", payload)
    return EXIT_OK if all_ok else EXIT_EARLY


def cmd_check(cfg, outdir):
    _check_keys(cfg, "check config", ("condition_set", "gamma", "beta", "b"),
                ("extra", "grid", "certificate", "out"))
    gamma = sch.from_config(cfg["gamma"])
    beta = sch.from_config(cfg["beta"])
    b = sch.from_config(cfg["b"])
    grid = cfg.get("grid")
    set_name = cfg["condition_set"]
    cert = None
    if cfg.get("certificate") is not None:
        if isinstance(grid, dict) and "t0" in grid:
            t0 = float(grid["t0"])
        else:
            t0 = max(gamma.t0, beta.t0, b.t0) or 1.0
        cert, gamma = _build_certificate(cfg["certificate"], gamma, beta, b, t0)
    report = certs.check_conditions(set_name, gamma, beta, b, cert=cert,
                                    extra=cfg.get("extra"), grid=grid)
    report.to_csv(outdir / "margins.csv")
    payload = report.summary()
    payload["status"] = "completed"
    _write_json(outdir / "summary.json", payload)
    return {"satisfied": EXIT_OK, "violated": EXIT_VIOLATED,
            "boundary": EXIT_BOUNDARY}[report.verdict]


def _claim_from_config(cfg):
    _check_keys(cfg, "claim", ("kind",), ("s", "c", "q", "window", "schedule"))
    kind = cfg["kind"]
    window = cfg.get("window")
    if kind == "power":
        return ana.RateClaim("power", power=cfg.get("s"), window=window)
    if kind in ("exp-power", "exp_power"):
        return ana.RateClaim("exp_power", coeff=cfg.get("c"), q=cfg.get("q"),
                             window=window)
    if kind == "denominator":
        if "schedule" not in cfg:
            raise ConfigError("denominator claim needs a 'schedule' entry")
        return ana.RateClaim("denominator",
                             denominator=sch.from_config(cfg["schedule"]),
                             window=window)
    raise ConfigError(f"unknown claim kind {kind!r}")


def cmd_rate(cfg, outdir):
    _check_keys(cfg, "rate config", ("claim",),
                ("trajectory_csv", "simulate", "fit", "out"))
    has_csv = "trajectory_csv" in cfg
    has_sim = "simulate" in cfg
    if has_csv == has_sim:
        raise ConfigError("rate needs exactly one of 'trajectory_csv' or 'simulate'")
    if has_csv:
        path = Path(cfg["trajectory_csv"])
        if not path.exists():
            raise FileNotFoundError(str(path))
        data = np.genfromtxt(path, delimiter=",", names=True)
        if data.dtype.names is None or "t" not in data.dtype.names \
                or "fgap" not in data.dtype.names:
            raise ConfigError(f"{path} lacks the trajectory columns 't' and 'fgap'")
        traj = SimpleNamespace(ts=np.atleast_1d(data["t"]),
                               fgap=np.atleast_1d(data["fgap"]), meta={})
        source = {"trajectory_csv": str(path)}
    else:
        traj, run_summary = _run_simulation(cfg["simulate"], outdir, "trajectory.csv")
        source = {"simulate": run_summary}
        if run_summary["status"] != "completed":
            payload = {"status": "early_stop", "source": source, "verdict": None}
            _write_json(outdir / "summary.json", payload)
            _write_json(outdir / "rate.json", payload)
            return EXIT_EARLY

    claim = _claim_from_config(cfg["claim"])
    verdict = ana.bound_check(traj, claim)
    result = verdict.summary()
    if "fit" in cfg:
        fit_cfg = cfg["fit"]
        _check_keys(fit_cfg, "fit", ("kind",), ("q", "window"))
        window = fit_cfg.get("window", claim.window)
        if fit_cfg["kind"] == "power":
            fit = ana.fit_power_rate(traj, window)
        elif fit_cfg["kind"] in ("exp", "exp-power", "exp_power"):
            if "q" not in fit_cfg:
                raise ConfigError("exp fit needs 'q'")
            fit = ana.fit_exp_rate(traj, fit_cfg["q"], window)
        else:
            raise ConfigError(f"unknown fit kind {fit_cfg['kind']!r}")
        result["fitted_exponent"] = fit.exponent
        result["fit"] = fit.summary()

    payload = {"status": "completed", "source": source, **result}
    _write_json(outdir / "rate.json", payload)
    _write_json(outdir / "summary.json", payload)
    return EXIT_OK if verdict.verdict == "bounded" else EXIT_VIOLATED


def _rule_from_config(cfg, which):
    if which == "alpha":
        _check_keys(cfg, "alpha rule", ("family",), ("a", "alpha"))
        if cfg["family"] == "constant":
            return alg.alpha_constant(cfg.get("a", 0.0))
        if cfg["family"] == "one-minus-over-k":
            return alg.alpha_one_minus_over_k(cfg.get("alpha", 3.0))
        raise ConfigError(f"unknown alpha family {cfg['family']!r}")
    _check_keys(cfg, "lambda rule", ("family",), ("l", "delta", "scale"))
    if cfg["family"] == "constant":
        return alg.lambda_constant(cfg.get("l", 1.0))
    if cfg["family"] == "power":
        return alg.lambda_power(cfg.get("delta", 0.0), cfg.get("scale", 1.0))
    raise ConfigError(f"unknown lambda family {cfg['family']!r}")


def cmd_ip(cfg, outdir):
    _check_keys(cfg, "ip config", ("objective", "alpha", "lambda", "K", "x0"),
                ("x1", "out"))
    obj = objective_from_config(cfg["objective"])
    ipcfg = alg.IPConfig(_rule_from_config(cfg["alpha"], "alpha"),
                         _rule_from_config(cfg["lambda"], "lambda"),
                         cfg["K"], cfg["x0"], cfg.get("x1"))
    seq = alg.inertial_proximal(obj, ipcfg)
    seq.to_csv(outdir / "iterates.csv")
    payload = {"status": "completed", "objective": obj.name, **seq.summary()}
    _write_json(outdir / "summary.json", payload)
    return EXIT_OK


_COMMANDS = {}


def cmd_sweep(cfg, outdir, jobs=1):
    _check_keys(cfg, "sweep config", ("command", "base", "grid"), ("out",))
    command = cfg["command"]
    if command not in ("simulate", "check", "rate", "ip"):
        raise ConfigError(f"sweep cannot fan out over {command!r}")
    grid = cfg["grid"]
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("sweep grid must be a non-empty mapping of path -> values")
    keys = sorted(grid)
    for k in keys:
        if not isinstance(grid[k], list) or not grid[k]:
            raise ConfigError(f"sweep grid entry {k!r} must be a non-empty list")

    points = list(product(*(grid[k] for k in keys)))
    fn = _COMMANDS[command]
    if not isinstance(cfg["base"], dict):
        raise ConfigError("sweep base must be a JSON object")
    base = _resolve_preset_key(copy.deepcopy(cfg["base"]), command)

    def run_point(i, values):
        sub = copy.deepcopy(base)
        for k, v in zip(keys, values):
            _apply_set(sub, k, v)
        pt_dir = outdir / f"pt_{i:04d}"
        pt_dir.mkdir(parents=True, exist_ok=True)
        try:
            code = fn(sub, pt_dir)
        except InertiaLabError as exc:
            _write_json(pt_dir / "summary.json",
                        {"status": "config_error", "error": str(exc)})
            code = EXIT_CONFIG
        return i, code

    results = [None] * len(points)
    with ThreadPoolExecutor(max_workers=max(1, int(jobs))) as pool:
        for i, code in pool.map(lambda iv: run_point(*iv), enumerate(points)):
            results[i] = code

    def fmt(v):
        return f"{v:.17g}" if isinstance(v, float) else str(v)

    with open(outdir / "index.csv", "w", newline="\n") as fh:
        fh.write(",".join(["dir"] + keys + ["exit_code"]) + "\n")
        for i, values in enumerate(points):
            row = [f"pt_{i:04d}"] + [fmt(v) for v in values] + [str(results[i])]
            fh.write(",".join(row) + "\n")

    payload = {"status": "completed", "command": command,
               "n_points": len(points), "exit_codes": results}
    _write_json(outdir / "summary.json", payload)
    return EXIT_OK if all(c == EXIT_OK for c in results) else max(results)


_COMMANDS.update({"simulate": cmd_simulate, "check": cmd_check,
                  "rate": cmd_rate, "ip": cmd_ip})


def _make_parser():
    parser = argparse.ArgumentParser(
        prog="inertia-lab",
        description="Numerical laboratory for damped inertial gradient dynamics.",
        epilog="INERTIA_LAB_SEED is reserved for future stochastic features "
               "and currently unused.")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "check", "rate", "ip", "sweep"):
        sp = subs.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--preset", help="named built-in config "
                        f"(one of: {', '.join(sorted(PRESETS))})")
        sp.add_argument("--set", action="append", default=[],
                        metavar="PATH=VALUE",
                        help="override a config key, e.g. gamma.alpha=4")
        sp.add_argument("--out", help="output directory")
        if name == "sweep":
            sp.add_argument("--jobs", type=int, default=1,
                            help="concurrent sweep points")
    return parser


def main(argv=None):
    args = _make_parser().parse_args(argv)
    command = args.command
    outdir = Path(args.out) if args.out else None
    cfg = None
    try:
        cfg = _load_config(args, command)
        if outdir is None:
            outdir = Path(cfg.pop("out", f"runs/{command}"))
        else:
            cfg.pop("out", None)
        outdir.mkdir(parents=True, exist_ok=True)
        if command == "sweep":
            return cmd_sweep(cfg, outdir, jobs=args.jobs)
        return _COMMANDS[command](cfg, outdir)
    except FileNotFoundError as exc:
        if outdir is None:
            outdir = Path(f"runs/{command}")
        outdir.mkdir(parents=True, exist_ok=True)
        _write_json(outdir / "summary.json",
                    {"status": "missing_input", "error": str(exc)})
        print(f"missing input file: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (InertiaLabError, KeyError, TypeError, ValueError) as exc:
        if outdir is None:
            outdir = Path(f"runs/{command}")
        outdir.mkdir(parents=True, exist_ok=True)
        _write_json(outdir / "summary.json",
                    {"status": "config_error", "error": str(exc)})
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
