import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewflow.cli import main
from skewflow.errors import ConfigurationError
from skewflow.expr import compile_expression, inline_field
from skewflow.svg import line_plot

INLINE = """[run]
scenario = fixed-point
system = inline
seed = 3

[params]
grid = 64
tol = 1e-8
cocycle_samples = 4
cocycle_systems = B1
{extra}

[system]
frequencies = 1.4142135623730951
f1 = -x1 + cos(th1)
"""


def write(tmp_path, text, name="c.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_expression_grammar_evaluates():
    fn = compile_expression("-x1 + 2*cos(th2) - exp(eps) / 4 + pi * x2 ** 2", 2, 2)
    th = np.array([[0.1, 0.5]])
    x = np.array([[0.3, -0.2]])
    expected = -0.3 + 2 * np.cos(0.5) - np.exp(0.1) / 4 + np.pi * 0.04
    assert fn(th, x, 0.1)[0] == pytest.approx(expected)
    assert fn(np.zeros((5, 2)), np.zeros((5, 2)), 0.0).shape == (5,)


@pytest.mark.parametrize("text", ["__import__('os')", "x1.real", "x3", "th0", "foo", "sin(x1, x1)",
                                  "[x1]", "x1 if x1 else 0", "1 +"])
def test_expression_grammar_rejects(text):
    with pytest.raises(ConfigurationError):
        compile_expression(text, 1, 2)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_inline_field_matches_python(a, b):
    fld = inline_field([1.0, np.sqrt(2.0)], ["x2 * sin(th1)", "-x1 - x2"])
    out = fld.eval(np.array([0.4, 0.1]), np.array([a, b]))
    np.testing.assert_allclose(out, [b * np.sin(0.4), -a - b], atol=1e-12)


def test_list_has_eight_stable_rows(capsys):
    assert main(["--list"]) == 0
    first = capsys.readouterr().out
    assert main(["--list"]) == 0
    assert capsys.readouterr().out == first
    rows = first.strip().splitlines()[1:]
    assert len(rows) == 8
    names = [r.split()[0] for r in rows]
    assert names == ["attractor-equivalence", "fixed-point", "spectrum", "q-continuity",
                     "reduction-frame", "manifold", "asymptotic-phase", "pliss"]


def test_inline_run_passes_and_is_deterministic(tmp_path):
    cfg = write(tmp_path, INLINE.format(extra=""))
    assert main(["--config", cfg, "--outdir", str(tmp_path / "a")]) == 0
    assert main(["--config", cfg, "--outdir", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "report.csv").read_bytes()
    assert a == (tmp_path / "b" / "report.csv").read_bytes()
    lines = a.decode().splitlines()
    assert lines[0] == "scenario,criterion,measured,threshold,pass,note"
    assert any("C3.alpha_hat" in ln for ln in lines)
    for name in ("curves.csv", "plot.svg", "section.csv"):
        assert (tmp_path / "a" / name).exists()


def test_seed_flag_overrides(tmp_path):
    cfg = write(tmp_path, INLINE.format(extra=""))
    assert main(["--config", cfg, "--outdir", str(tmp_path / "a"), "--seed", "3"]) == 0
    assert main(["--config", cfg, "--outdir", str(tmp_path / "b"), "--seed", "4"]) == 0
    assert (tmp_path / "a" / "report.csv").read_bytes() != (tmp_path / "b" / "report.csv").read_bytes()


@pytest.mark.parametrize("extra,sub", [
    ("tol = -1e-6", None),
    ("grid = many", None),
    ("unknown_key = 1", None),
    ("", ("scenario = fixed-point", "scenario = nonsense")),
    ("", ("system = inline", "system = B7")),
    ("", ("f1 = -x1 + cos(th1)", "f1 = -x1 + open(th1)")),
    ("", ("[run]", "[runner]")),
])
def test_config_errors_exit_2(tmp_path, extra, sub):
    text = INLINE.format(extra=extra)
    if sub:
        text = text.replace(*sub)
    assert main(["--config", write(tmp_path, text), "--outdir", str(tmp_path / "o")]) == 2


def test_missing_config_exit_2(tmp_path):
    assert main([]) == 2
    assert main(["--config", str(tmp_path / "absent.ini")]) == 2


def test_failing_criterion_exit_1(tmp_path):
    # an impossible alpha tolerance makes the run fail without a config error
    text = INLINE.format(extra="").replace("system = inline", "system = B1-scalar")
    text = text.replace("cocycle_systems = B1", "cocycle_systems = B1\nalpha_tol = 1e-300")
    assert main(["--config", write(tmp_path, text), "--outdir", str(tmp_path / "o")]) == 1
    report = (tmp_path / "o" / "report.csv").read_text()
    assert "C3.alpha_hat" in report and "false" in report


def test_runtime_failure_exit_1_with_diagnostics(tmp_path):
    text = INLINE.format(extra="").replace("f1 = -x1 + cos(th1)", "f1 = x1 + cos(th1)")
    assert main(["--config", write(tmp_path, text), "--outdir", str(tmp_path / "o")]) == 1
    report = (tmp_path / "o" / "report.csv").read_text().splitlines()
    assert report[1].startswith("fixed-point,run,")


def test_threads_env_var(monkeypatch):
    from skewflow.parallel import parallel_map, thread_count
    monkeypatch.setenv("SKEWFLOW_THREADS", "3")
    assert thread_count() == 3
    assert parallel_map(lambda v: v * v, [1, 2, 3]) == [1, 4, 9]


def test_svg_log_scale(tmp_path):
    path = tmp_path / "p.svg"
    line_plot(path, {"a": ([0, 1, 2], [1.0, 0.1, 0.0]), "b": ([0, 1], [2.0, 3.0])}, "t", logy=True)
    text = path.read_text()
    assert text.startswith("<svg") and text.count("<polyline") == 2
