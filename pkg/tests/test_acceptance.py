"""Acceptance criteria, each run at its stated tolerance through the CLI.

Every criterion prints one PASS/FAIL line (collected in the terminal
summary).  Scenario runs are shared between criteria and cached per
session; criterion 12 re-runs every config and compares report bytes.
"""
import csv
import time
from pathlib import Path

import pytest

from skewflow.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
LINES = []

# criterion number -> (config, row prefix, description, budget in seconds)
CRITERIA = {
    1: ("attractor_equivalence", "C1.", "Hausdorff metric axioms on 1000 cloud triples", 10),
    2: ("fixed_point", "C2.", "cocycle law on B1, B2", 30),
    3: ("fixed_point", "C3.", "fixed-point section of the scalar model", 60),
    4: ("attractor_equivalence", "C4.", "pullback and Lyapunov tests agree", 120),
    5: ("spectrum_diag01", "C5.", "spectrum of diag(0, -1)", 60),
    6: ("spectrum_b1", "C6.", "spectrum splitting on B1", 600),
    7: ("q_continuity", "C7.", "dichotomy projection continuity", 600),
    8: ("reduction_frame", "C8.", "block-diagonalizing frame on B1", 300),
    9: ("manifold", "C9.", "integral manifold chart on B2", 600),
    10: ("asymptotic_phase", "C10.", "asymptotic phase on B2", 600),
    11: ("pliss", "C11.", "reduction principle on B2", 600),
}
SCENARIO_CONFIGS = sorted({c for c, *_ in CRITERIA.values()})


def record(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line)


class Runs:
    def __init__(self, root):
        self.root = root
        self.cache = {}

    def get(self, name, tag="first"):
        key = (name, tag)
        if key not in self.cache:
            out = self.root / tag / name
            start = time.perf_counter()
            code = main(["--config", str(CONFIGS / f"{name}.ini"), "--outdir", str(out)])
            elapsed = time.perf_counter() - start
            with open(out / "report.csv", newline="") as fh:
                rows = list(csv.DictReader(fh))
            self.cache[key] = (code, rows, elapsed, (out / "report.csv").read_bytes())
        return self.cache[key]


@pytest.fixture(scope="session")
def runs(tmp_path_factory):
    return Runs(tmp_path_factory.mktemp("acceptance"))


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(runs, number):
    config, prefix, text, budget = CRITERIA[number]
    code, rows, elapsed, _ = runs.get(config)
    assert code in (0, 1), f"{config} exited with {code}"
    mine = [r for r in rows if r["criterion"].startswith(prefix)]
    failed = [r for r in mine if r["pass"] != "true"]
    detail = "; ".join(f"{r['criterion']} measured={r['measured']} threshold={r['threshold']}" for r in mine)
    ok = bool(mine) and not failed
    record(number, ok, f"{text} [{config}, {elapsed:.0f} s run, budget {budget} s] {detail or rows}")
    assert mine, f"no {prefix} rows in {config} report: {rows}"
    assert not failed, f"failed rows: {failed}"


def test_criterion_12_determinism(runs):
    mismatched = []
    for name in SCENARIO_CONFIGS:
        first = runs.get(name)[3]
        second = runs.get(name, tag="second")[3]
        if first != second:
            mismatched.append(name)
    record(12, not mismatched, f"byte-identical report.csv on re-run of {len(SCENARIO_CONFIGS)} configs"
           + (f"; differing: {mismatched}" if mismatched else ""))
    assert not mismatched
