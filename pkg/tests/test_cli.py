import math
import os

import numpy as np
import pytest

from oscillab import fileio
from oscillab.cli import main
from oscillab.continuation import HarmonicPdeState
from oscillab.fields import ComplexField


def read_kv(path):
    out = {}
    for line in open(path, encoding="utf-8"):
        key, _, val = line.partition(" = ")
        out[key] = val.strip()
    return out


def run(tmp_path, command, *args):
    out = tmp_path / command
    code = main([command, "--out", str(out), *args])
    return code, out


def test_flatstates(tmp_path):
    code, out = run(tmp_path, "flatstates")
    assert code == 0
    assert (out / "manifest.txt").exists()
    summary = read_kv(out / "summary.txt")
    assert float(summary["gamma0"]) == pytest.approx(math.sqrt(4.25),
                                                     abs=1e-12)
    assert float(summary["gamma_d"]) == pytest.approx(1.2070196981508372,
                                                      rel=1e-10)
    assert summary["n_roots"] == "2"
    header, rows = fileio.read_csv(out / "flatstates.csv")
    assert header[:3] == ["r_sq", "r", "phi"]
    assert len(rows) == 2
    assert all(float(r[3]) < 1e-12 for r in rows)


def test_flatstates_pde_reports_forcing_scale(tmp_path):
    code, out = run(tmp_path, "flatstates", "--override", "system.kind=pde")
    assert code == 0
    summary = read_kv(out / "summary.txt")
    gamma0 = float(summary["gamma0"])
    assert float(summary["f_onset_weak"]) == pytest.approx(0.04 * gamma0)


def test_bad_override_is_config_error(tmp_path):
    code, _ = run(tmp_path, "flatstates", "--override", "params.bogus=1")
    assert code == 2
    code, _ = run(tmp_path, "flatstates", "--config", "/nonexistent.ini")
    assert code == 2


def test_floquet_weak(tmp_path):
    code, out = run(tmp_path, "floquet",
                    "--override", "system.kind=pde",
                    "--override", "floquet.diagnostics=true")
    assert code == 0
    summary = read_kv(out / "summary.txt")
    f_c = float(summary["f_c"])
    assert 0.0815 < f_c < 0.0826
    assert float(summary["method_rel_gap"]) < 1e-6
    assert float(summary["weak_limit_formula"]) == pytest.approx(
        0.08246211251235325, rel=1e-12)
    assert float(summary["mathieu_residual"]) < 1e-8
    # unforced multipliers sit on the circle of radius e^{mu*pi}
    mods = math.hypot(float(summary["multiplier_f0_0_re"]),
                      float(summary["multiplier_f0_0_im"]))
    assert mods == pytest.approx(math.exp(-0.005 * math.pi), rel=1e-6)
    header, rows = fileio.read_csv(out / "eigenfunctions.csv")
    assert header == ["t", "p1", "q1", "p1_adj"]
    assert len(rows) == 256


def test_reduce_weak(tmp_path):
    code, out = run(tmp_path, "reduce")
    assert code == 0
    items = read_kv(out / "reduction.txt")
    assert items["regime"] == "weak"
    assert float(items["lin"]) == pytest.approx(math.sqrt(17.0), rel=1e-12)
    assert float(items["diff"]) == pytest.approx(9.0, rel=1e-12)
    assert float(items["cub"]) == pytest.approx(9.0, rel=1e-12)
    assert float(items["phi1"]) == pytest.approx(0.6629088318340163,
                                                 rel=1e-10)
    assert "sech_amp" in items
    assert (out / "seed.txt").exists()


def test_reduce_supercritical_fails_cleanly(tmp_path, capsys):
    code, out = run(tmp_path, "reduce",
                    "--override", "params.c_re=1.0",
                    "--override", "params.c_im=2.5")
    assert code == 3
    assert (out / "manifest.txt").exists()   # manifest written before failure
    items = read_kv(out / "reduction.txt")
    assert items["sech_seed"].startswith("unavailable")
    assert "existence failure" in capsys.readouterr().err


def test_simulate_zero_seed_stays_zero(tmp_path):
    code, out = run(tmp_path, "simulate", "--seed", "zero",
                    "--override", "grid.n=64",
                    "--override", "timestepping.t_end=5.0")
    assert code == 0
    summary = read_kv(out / "summary.txt")
    assert float(summary["final_norm"]) < 1e-12
    assert summary["steady_converged"] == "true"
    header, rows = fileio.read_csv(out / "norms.csv")
    assert header == ["t", "norm"]
    assert (out / "final.txt").exists()


def test_simulate_file_seed_round_trip(tmp_path):
    code, first = run(tmp_path, "simulate", "--seed", "flat",
                      "--override", "grid.n=64",
                      "--override", "timestepping.t_end=5.0")
    assert code == 0
    final = first / "final.txt"
    out2 = tmp_path / "second"
    code = main(["simulate", "--out", str(out2),
                 "--seed", f"file:{final}",
                 "--override", "grid.n=64",
                 "--override", "timestepping.t_end=2.0"])
    assert code == 0
    a = read_kv(first / "summary.txt")
    b = read_kv(out2 / "summary.txt")
    # the flat state is a fixed point, so the norm carries over unchanged
    assert float(b["final_norm"]) == pytest.approx(float(a["final_norm"]),
                                                   rel=1e-9)
    assert float(b["final_norm"]) > 0.5


def test_simulate_rejects_harmonic_file_for_fcgl(tmp_path):
    rng = np.random.default_rng(0)
    state = HarmonicPdeState(length=20 * math.pi,
                             harmonics=np.array([-3, -1, 1, 3]),
                             profiles=rng.standard_normal((4, 16)) + 0j,
                             f=0.05)
    snap = tmp_path / "harm.txt"
    fileio.write_snapshot(snap, state)
    code, _ = run(tmp_path, "simulate", "--seed", f"file:{snap}")
    assert code == 2


def test_continue_flat_branch(tmp_path):
    code, out = run(tmp_path, "continue", "--seed", "flat",
                    "--override", "params.gamma=1.6",
                    "--override", "grid.n=64",
                    "--override", "continuation.max_points=20",
                    "--override", "continuation.param_min=1.4",
                    "--override", "continuation.param_max=1.75",
                    "--override", "continuation.classify=false")
    assert code == 0
    header, rows = fileio.read_csv(out / "branch.csv")
    assert header == ["index", "parameter", "norm", "stability", "fold_flag"]
    assert len(rows) >= 10
    assert [int(r[0]) for r in rows] == list(range(len(rows)))
    assert all(r[3] == "unclassified" for r in rows)
    params = [float(r[1]) for r in rows]
    assert min(params) >= 1.4 - 0.05 and max(params) <= 1.75 + 0.05
    assert (out / "folds.csv").exists()
    assert (out / "point_0000.txt").exists()


def test_sweep_serial(tmp_path, monkeypatch):
    monkeypatch.setenv("OSCILLON_THREADS", "1")
    code, out = run(tmp_path, "sweep",
                    "--override", "grid.n=64",
                    "--override", "timestepping.dt=0.05",
                    "--override", "sweep.nu_min=2.0",
                    "--override", "sweep.nu_max=2.0",
                    "--override", "sweep.nu_count=1",
                    "--override", "sweep.p_min=1.3",
                    "--override", "sweep.p_max=2.5",
                    "--override", "sweep.p_count=2",
                    "--override", "sweep.t_probe=60.0")
    assert code == 0
    header, rows = fileio.read_csv(out / "sweep.csv")
    assert header == ["nu", "gamma", "outcome"]
    assert len(rows) == 2
    assert [r[2] for r in rows] == ["decayed", "flat"]


def test_unknown_command_exits_via_argparse(tmp_path):
    with pytest.raises(SystemExit):
        main(["spin", "--out", str(tmp_path / "x")])
