import csv
import io
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from mirrordeco import cli
from mirrordeco.config import ExperimentConfig
from mirrordeco.errors import InvalidInputError
from mirrordeco.experiments import run_fig3, run_oracle_suite, run_sweep
from mirrordeco.report import PlotSpec, Table, emit_svg


def read_csv(path):
    lines = path.read_text().splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return comments, rows


def run(tmp_path, command, config_text=None, *extra):
    argv = [command, "--out", str(tmp_path / f"{command}.csv"), *extra]
    if config_text is not None:
        cfg = tmp_path / "cfg.toml"
        cfg.write_text(config_text)
        argv += ["--config", str(cfg)]
    return cli.main(argv)


# ----------------------------------------------------------------------- fig3

def test_fig3_defaults(tmp_path):
    assert run(tmp_path, "fig3", None, "--svg", str(tmp_path / "f.svg")) == 0
    comments, rows = read_csv(tmp_path / "fig3.csv")
    assert any(c.startswith("# config: {") for c in comments)
    assert any("units" in c for c in comments)
    assert {int(r["N"]) for r in rows} == {1_000_000, 2_000_000, 4_000_000, 10_000_000}
    for r in rows:
        if int(r["N"]) == 1_000_000:
            assert float(r["tau_d"]) == pytest.approx(2.378, abs=5e-4)
        if int(r["N"]) == 4_000_000:
            assert float(r["tau_d"]) == pytest.approx(1.682, abs=5e-4)
        if float(r["t"]) == 0.0:
            assert float(r["abs_F"]) == 1.0
        assert math.exp(float(r["log_mag"])) == pytest.approx(float(r["abs_F"]), rel=1e-12)
    svg = (tmp_path / "f.svg").read_text()
    assert svg.count("<polyline") == 4


def test_fig3_csv_format(tmp_path):
    run(tmp_path, "fig3")
    raw = (tmp_path / "fig3.csv").read_bytes()
    assert b"\r" not in raw
    header = [ln for ln in raw.decode().splitlines() if not ln.startswith("#")][0]
    assert header == "N,t,abs_F,log_mag,tau_d"
    # 17 significant digits
    _, rows = read_csv(tmp_path / "fig3.csv")
    assert rows[1]["t"] == format(0.05, ".17g")


def test_fig3_threads_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    assert run(a, "fig3", None, "--threads", "1") == 0
    assert run(b, "fig3", None, "--threads", "6") == 0
    assert (a / "fig3.csv").read_bytes() == (b / "fig3.csv").read_bytes()


def test_fig3_rejects_mixed_modes(tmp_path):
    text = "[model]\nmode_masses = [1.0, 2.0]\nmode_forces = [1.0, 1.0]\nmode_widths = [1.0]"
    assert run(tmp_path, "fig3", text) == 1


# ---------------------------------------------------------------------- sweep

def test_sweep_time_identity(tmp_path):
    text = "[model]\nmode_masses = [1.0]\nmode_forces = [1.0]\nmode_widths = [1.0]\n" \
           "mode_count = 1\n[sweep]\nvariable = 't'\nstart = 0.0\nstop = 3.0\ncount = 31\n"
    assert run(tmp_path, "sweep", text) == 0
    _, rows = read_csv(tmp_path / "sweep.csv")
    assert len(rows) == 31
    for r in rows:
        assert float(r["abs_F"]) == pytest.approx(float(r["exp_half_phase_var"]), rel=1e-12)


def test_sweep_mode_count_linear(tmp_path):
    text = "t = 1.3\n[model]\nmode_masses = [0.7]\nmode_forces = [0.2]\nmode_widths = [0.9]\n" \
           "mode_count = 1\n[sweep]\nvariable = 'N'\nstart = 1.0\nstop = 1e6\ncount = 13\n" \
           "spacing = 'log'"
    assert run(tmp_path, "sweep", text) == 0
    _, rows = read_csv(tmp_path / "sweep.csv")
    per_mode = [float(r["log_mag"]) / int(r["N"]) for r in rows]
    assert np.ptp(per_mode) <= 1e-12 * abs(per_mode[0])


def test_sweep_width_minimum(tmp_path):
    text = "t = 1.0\n[model]\nmode_masses = [1.0]\nmode_forces = [1.0]\nmode_count = 1\n" \
           "[sweep]\nvariable = 'a'\nstart = 0.3\nstop = 0.7\ncount = 401\n"
    assert run(tmp_path, "sweep", text) == 0
    _, rows = read_csv(tmp_path / "sweep.csv")
    best = max(rows, key=lambda r: float(r["log_mag"]))
    assert float(best["a"]) ** 2 == pytest.approx(0.25, abs=1e-12)
    assert float(best["log_mag"]) == pytest.approx(-(0.25 / 2 + 1 / (32 * 0.25)), rel=1e-12)


def test_sweep_pointer_width(tmp_path):
    text = "t = 1.0\nm = 0\nn = 1\n[sweep]\nvariable = 'sigma_x'\nstart = 1e-3\nstop = 0.5\n" \
           "count = 20\nspacing = 'log'\n"
    assert run(tmp_path, "sweep", text, "--svg", str(tmp_path / "s.svg")) == 0
    _, rows = read_csv(tmp_path / "sweep.csv")
    mags = [float(r["abs_pointer_overlap"]) for r in rows]
    assert all(b >= a for a, b in zip(mags, mags[1:]))  # grows towards sigma^2 = t/4
    assert mags[0] < 1e-12


def test_sweep_threads_identical():
    cfg = ExperimentConfig()
    assert run_sweep(cfg, 1).to_csv() == run_sweep(cfg, 4).to_csv()


# --------------------------------------------------------------------- oracle

def test_oracle_default_passes(tmp_path):
    assert run(tmp_path, "oracle") == 0
    _, rows = read_csv(tmp_path / "oracle.csv")
    assert rows and all(r["status"] == "pass" for r in rows)
    assert sum(r["check"].startswith("factor_mode") for r in rows) == 20
    assert sum(r["check"].startswith("hamiltonian") for r in rows) == 20


def test_oracle_width_dropped_fails(tmp_path):
    text = "[oracle]\nwidth_dropped = true\nsamples = 2\nhamiltonian_specs = 1\n"
    assert run(tmp_path, "oracle", text) == 2
    _, rows = read_csv(tmp_path / "oracle.csv")
    pin = [r for r in rows if r["check"] == "width_pin"][0]
    assert pin["status"] == "fail"
    assert all(r["status"] == "pass" for r in rows if r["check"] != "width_pin")


def test_oracle_refuses_large_n(tmp_path):
    text = "[oracle]\nhamiltonian_n = 20\nsamples = 1\n"
    assert run(tmp_path, "oracle", text) == 0
    _, rows = read_csv(tmp_path / "oracle.csv")
    refused = [r for r in rows if r["check"] == "hamiltonian"]
    assert refused and refused[0]["status"] == "refused" and refused[0]["params"] == "N=20"


def test_oracle_seed_reproducible():
    cfg = ExperimentConfig.from_toml("[oracle]\nsamples = 3\nhamiltonian_specs = 2\n")
    a, _ = run_oracle_suite(cfg, seed=7)
    b, _ = run_oracle_suite(cfg, seed=7, threads=3)
    assert a.to_csv() == b.to_csv()


def test_oracle_disabled(tmp_path):
    assert run(tmp_path, "oracle", "[oracle]\nenabled = false\n") == 1


# ------------------------------------------------------------ other commands

def test_model_command(tmp_path):
    text = "[model]\nmasses = [1.0, 2.0, 3.0]\ncouplings = [1.0, 0.0, 0.0]\n"
    assert run(tmp_path, "model", text) == 0
    out = (tmp_path / "model.csv").read_text()
    assert "effective_masses" in out and "tau_d" in out


def test_model_command_no_decoherence(tmp_path, capsys):
    assert cli.main(["model", "--config", str(_write(tmp_path, "m = 1\nn = 1\n"))]) == 0
    assert "undefined" in capsys.readouterr().out


def test_density_command(tmp_path):
    text = "t = 1.0\nm = 0\nn = 1\n[model]\nmode_masses = [1.0]\nmode_forces = [1.0]\n" \
           "mode_widths = [1.0]\nmode_count = 1\n[cavity]\nalpha = [0.5, 0.0]\ntol = 1e-6\n"
    assert run(tmp_path, "density", text) == 0
    comments, rows = read_csv(tmp_path / "density.csv")
    trace = sum(float(r["re"]) for r in rows if r["n"] == r["m"])
    assert trace == pytest.approx(1.0, abs=1e-6)
    r10 = [r for r in rows if (r["n"], r["m"]) == ("1", "0")][0]
    assert float(r10["abs_F"]) == pytest.approx(math.exp(-0.53125), rel=1e-12)


def test_phase_command(tmp_path):
    text = "t = 2.0\nm = 0\nn = 1\n[model]\nmode_masses = [1.0]\nmode_forces = [1.0]\n" \
           "mode_widths = [1.0]\nmode_count = 4\n"
    assert run(tmp_path, "phase", text) == 0
    _, rows = read_csv(tmp_path / "phase.csv")
    mode, total = rows
    assert float(mode["d_variance"]) == pytest.approx(1.25)
    assert float(mode["phase_std"]) == pytest.approx(2 * math.sqrt(1.25))
    assert float(total["phase_std"]) == pytest.approx(4 * math.sqrt(1.25))


def _write(tmp_path, text):
    path = tmp_path / "c.toml"
    path.write_text(text)
    return path


def test_stdout_when_no_out(capsys):
    assert cli.main(["phase"]) == 0
    assert "kind,index" in capsys.readouterr().out


def test_invalid_config_exit_code(tmp_path, capsys):
    assert cli.main(["fig3", "--config", str(_write(tmp_path, "[sweep]\ncount = 1\n"))]) == 1
    assert "sweep.count" in capsys.readouterr().err


def test_bad_threads(tmp_path):
    assert cli.main(["fig3", "--threads", "0", "--out", str(tmp_path / "x.csv")]) == 1


def test_svg_needs_plot(tmp_path):
    assert run(tmp_path, "phase", None, "--svg", str(tmp_path / "p.svg")) == 1


# ------------------------------------------------------------------------ svg

def test_svg_single_row_rejected():
    with pytest.raises(InvalidInputError):
        emit_svg(Table(["x", "y"], [(0.0, 1.0)]), PlotSpec("x", "y"))


def test_svg_deterministic_and_shaped():
    table = run_fig3(ExperimentConfig())
    spec = PlotSpec("t", "abs_F", group="N", title="|F| & <decay>")
    a = emit_svg(table, spec)
    assert a == emit_svg(table, spec)
    assert a.count("<polyline") == 4
    assert "&amp;" in a and "&lt;decay&gt;" in a
    # curves start at |F| = 1 (top of the plot) and end lower
    for line in a.splitlines():
        if line.startswith("<polyline"):
            pts = line.split('points="')[1].rstrip('"/>').split()
            ys = [float(p.split(",")[1]) for p in pts]
            assert ys[0] == min(ys) and ys[-1] > ys[0]


def test_svg_log_axis():
    table = Table(["x", "y"], [(0.0, 1.0), (1.0, 1e-5), (2.0, 0.0)])
    out = emit_svg(table, PlotSpec("x", "y", log_y=True))
    assert "<polyline" in out and "1e" in out


# --------------------------------------------------------------------- golden

GOLDEN = Path(__file__).parent / "data" / "fig3_golden.csv"


@pytest.mark.parametrize("backend", ["python", "default"])
def test_fig3_golden(tmp_path, backend):
    """The default fig3 run reproduces the stored file byte for byte on either backend."""
    env = dict(os.environ)
    env.pop("MIRRORDECO_BACKEND", None)
    if backend == "python":
        env["MIRRORDECO_BACKEND"] = "python"
    out = tmp_path / "fig3.csv"
    subprocess.run([sys.executable, "-m", "mirrordeco.cli", "fig3", "--out", str(out)],
                   check=True, env=env)
    assert out.read_bytes() == GOLDEN.read_bytes()
