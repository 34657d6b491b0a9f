"""Command line scenario runner.

Config files are INI style:

    [run]
    scenario = fixed-point
    system = B1-scalar        ; benchmark name, or "inline" with a [system] section
    seed = 0
    outdir = out

    [params]
    t0 = 1.0

    [system]                  ; only for system = inline
    frequencies = 1.4142135623730951
    f1 = -x1 + cos(th1)

Exit status: 0 all criteria pass, 1 some criterion fails or the run
aborts numerically, 2 configuration error.
"""
import argparse
import configparser
import os
import sys
import traceback

import numpy as np

from . import io
from .errors import ConfigurationError, SkewflowError
from .parallel import thread_count
from .scenarios import SCENARIOS, Params, list_table, resolve_system
from .svg import line_plot

REPORT_HEADER = ["scenario", "criterion", "measured", "threshold", "pass", "note"]


def load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    if not parser.has_section("run"):
        raise ConfigurationError("config needs a [run] section")
    run = dict(parser["run"])
    unknown = sorted(set(parser.sections()) - {"run", "params", "system"})
    if unknown:
        raise ConfigurationError(f"unknown config sections {unknown}")
    params = dict(parser["params"]) if parser.has_section("params") else {}
    inline = dict(parser["system"]) if parser.has_section("system") else None
    return run, params, inline


def run(config_path, outdir=None, seed=None):
    """Run one scenario; returns the exit status."""
    run_sec, raw_params, inline = load_config(config_path)
    name = run_sec.get("scenario", "").strip()
    if name not in SCENARIOS:
        raise ConfigurationError(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}")
    fn, default_system, _, _ = SCENARIOS[name]
    system = resolve_system(run_sec.get("system", default_system).strip(), inline)
    if seed is None:
        try:
            seed = int(run_sec.get("seed", "0"))
        except ValueError:
            raise ConfigurationError("seed must be an integer") from None
    outdir = outdir or run_sec.get("outdir", "out")
    params = Params(raw_params)
    threads = thread_count(None)
    os.makedirs(outdir, exist_ok=True)
    report_path = os.path.join(outdir, "report.csv")
    try:
        result = fn(system, params, seed, threads)
    except ConfigurationError:
        raise
    except (SkewflowError, ArithmeticError, FloatingPointError) as exc:
        # numerical failure: record diagnostics, exit 1
        last = traceback.extract_tb(exc.__traceback__)[-1]
        io.write_rows(report_path, REPORT_HEADER,
                      [[name, "run", type(exc).__name__, "", False, f"{exc} at {last.name}"]])
        print(f"{name}: FAIL ({type(exc).__name__}: {exc})")
        return 1
    leftover = params.unused()
    if leftover:
        raise ConfigurationError(f"unknown parameters for {name}: {leftover}")

    io.write_rows(report_path, REPORT_HEADER,
                  [[name, c.name, c.measured, c.threshold, c.passed, c.note] for c in result.criteria])
    rows = []
    for cname, (x, y) in result.curves.items():
        rows += [[cname, xv, yv] for xv, yv in zip(np.ravel(x), np.ravel(y))]
    io.write_rows(os.path.join(outdir, "curves.csv"), ["curve", "x", "y"], rows)
    if result.curves:
        line_plot(os.path.join(outdir, "plot.svg"), result.curves, f"{name}: {result.title}", result.logy)
    for fname, writer in result.files.items():
        writer(os.path.join(outdir, fname))
    for c in result.criteria:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  measured={c.measured!r}  threshold={c.threshold!r}")
    print(f"{name}: {'PASS' if result.passed else 'FAIL'}")
    return 0 if result.passed else 1


def main(argv=None):
    parser = argparse.ArgumentParser(prog="skewflow", description="Run skew-product flow experiments.")
    parser.add_argument("--config", help="INI experiment config")
    parser.add_argument("--outdir", help="output directory (overrides the config)")
    parser.add_argument("--seed", type=int, help="random seed (overrides the config)")
    parser.add_argument("--list", action="store_true", help="list scenarios and exit")
    args = parser.parse_args(argv)
    if args.list:
        print(list_table())
        return 0
    if not args.config:
        print("error: --config is required (or use --list)", file=sys.stderr)
        return 2
    try:
        return run(args.config, args.outdir, args.seed)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
