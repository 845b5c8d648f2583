import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from qcmap import cli
from qcmap.linalg import ConvergenceError


def run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path / "run")])


def read_report(path):
    out = {}
    for line in open(path, encoding="utf-8"):
        key, _, value = line.rstrip("\n").partition(": ")
        out[key] = value
    return out


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(x) for x in r] for r in rows[1:]]).reshape(len(rows) - 1, len(rows[0]))


def test_spectrum_dimer(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "dimer", "--epsilon", "1", "--v", "0.005") == 0
    rep = read_report(tmp_path / "run_spectrum.txt")
    assert float(rep["eigenvalue_0"]) == pytest.approx(0.995, abs=1e-15)
    assert float(rep["eigenvalue_1"]) == pytest.approx(1.005, abs=1e-15)
    assert float(rep["rca_ratio"]) == pytest.approx(0.005)
    assert rep["rca_regime"] == "valid"


def test_spectrum_ring_and_uncoupled(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "ring", "--n", "4", "--epsilon", "1", "--v", "0.1") == 0
    rep = read_report(tmp_path / "run_spectrum.txt")
    vals = [float(rep[f"eigenvalue_{k}"]) for k in range(4)]
    np.testing.assert_allclose(vals, [0.8, 1.0, 1.0, 1.2], atol=1e-14)
    assert run(tmp_path, "spectrum", "--model", "ring", "--n", "5", "--epsilon", "1.5", "--v", "0") == 0
    rep = read_report(tmp_path / "run_spectrum.txt")
    assert all(float(rep[f"eigenvalue_{k}"]) == 1.5 for k in range(5))


def test_evolve_equivalence_run(tmp_path):
    code = run(tmp_path, "evolve", "--model", "dimer", "--omega", "1", "--k", "0.01",
               "--methods", "quantum-spectral,classical-exact", "--samples", "501")
    assert code == 0
    h1, a = read_csv(tmp_path / "run_quantum-spectral.csv")
    h2, b = read_csv(tmp_path / "run_classical-exact.csv")
    assert h1 == h2
    assert h1[:6] == ["t", "q_0", "p_0", "re_z_0", "im_z_0", "pop_0"]
    assert h1[-2:] == ["re_coh_0_1", "im_coh_0_1"]
    np.testing.assert_array_equal(a[:, 0], b[:, 0])
    pop = h1.index("pop_0")
    assert np.max(np.abs(a[:, pop] - b[:, pop])) <= 1e-8
    assert a[0, pop] == pytest.approx(1.0, abs=1e-15)
    assert a[0, h1.index("pop_1")] == pytest.approx(0.0, abs=1e-15)


def test_evolve_ring_populations_sum_to_one(tmp_path):
    assert run(tmp_path, "evolve", "--model", "ring", "--n", "6", "--v", "0.05",
               "--methods", "quantum-spectral", "--samples", "201") == 0
    header, data = read_csv(tmp_path / "run_quantum-spectral.csv")
    pops = data[:, [i for i, c in enumerate(header) if c.startswith("pop_")]]
    assert np.max(np.abs(pops.sum(axis=1) - 1)) <= 1e-12


def test_csv_roundtrip_is_lossless(tmp_path):
    assert run(tmp_path, "evolve", "--model", "dimer", "--omega", "1", "--k", "0.05",
               "--methods", "classical-rca-spring", "--samples", "101",
               "--initial-state", "0.6, 0.8j") == 0
    path = tmp_path / "run_classical-rca-spring.csv"
    traj = cli.read_trajectory_csv(str(path))
    again = tmp_path / "again.csv"
    cli.write_trajectory_csv(str(again), traj, [(0, 1)])
    assert path.read_bytes() == again.read_bytes()
    back = cli.read_trajectory_csv(str(again))
    assert np.array_equal(back.z, traj.z) and np.array_equal(back.t, traj.t)


def test_reruns_are_byte_identical(tmp_path):
    args = ["compare", "--model", "dimer", "--omega", "1", "--k", "0.01",
            "--methods", "quantum-spectral,classical-rca-spring", "--samples", "301"]
    assert cli.main([*args, "--out", str(tmp_path / "a")]) == 0
    assert cli.main([*args, "--out", str(tmp_path / "b")]) == 0
    for suffix in ("_figure.csv", "_compare.txt"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()


@pytest.mark.parametrize("k,lo,hi", [(0.01, 0.0, 0.04), (0.1, 0.15, 0.45)])
def test_compare_figure_contracts(tmp_path, k, lo, hi):
    assert run(tmp_path, "compare", "--model", "dimer", "--omega", "1", "--k", str(k),
               "--methods", "quantum-spectral,classical-rca-spring", "--samples", "2001") == 0
    rep = read_report(tmp_path / "run_compare.txt")
    assert lo <= float(rep["max_population_diff"]) <= hi
    assert float(rep["max_im_coherence_diff"]) <= hi
    # compensated amplitudes are as close as the populations
    assert float(rep["max_abs_amplitude_diff"]) <= max(hi, 2 * float(rep["max_population_diff"]))
    assert rep["phase_compensated"] == "true"
    header, data = read_csv(tmp_path / "run_figure.csv")
    assert header[:2] == ["t", "tau"]
    assert data[-1, 1] == pytest.approx(2 * math.pi, rel=1e-3)
    np.testing.assert_allclose(data[:, 1], data[:, 0] * k / 2, rtol=1e-15)
    re_a, re_b = data[:, header.index("re_a_0")], data[:, header.index("re_b_comp_0")]
    assert np.max(np.abs(re_a - re_b)) <= max(hi, 2 * float(rep["max_population_diff"]))


def test_compare_with_itself(tmp_path):
    assert run(tmp_path, "compare", "--model", "dimer", "--v", "0.005",
               "--methods", "classical-exact,classical-exact", "--samples", "51") == 0
    rep = read_report(tmp_path / "run_compare.txt")
    for key in ("max_abs_amplitude_diff", "max_population_diff", "rms_population_diff", "max_coherence_diff"):
        assert float(rep[key]) == 0.0


def test_sweep_monotone_and_consistent(tmp_path):
    common = ["--model", "dimer", "--omega", "1", "--methods", "quantum-spectral,classical-rca-spring",
              "--samples", "801"]
    assert cli.main(["sweep", *common, "--k-values", "0.001,0.01,0.1", "--workers", "3",
                     "--out", str(tmp_path / "s")]) == 0
    header, data = read_csv(tmp_path / "s_sweep.csv")
    assert header == ["k", "rca_validity_ratio", "splitting_error", "max_population_diff"]
    np.testing.assert_array_equal(data[:, 0], [0.001, 0.01, 0.1])
    assert np.all(np.diff(data[:, 3]) > 0)
    assert np.all(np.diff(np.abs(data[:, 2])) > 0)
    # one point equals a standalone compare run
    assert cli.main(["compare", *common, "--k", "0.01", "--out", str(tmp_path / "c")]) == 0
    rep = read_report(tmp_path / "c_compare.txt")
    assert float(rep["max_population_diff"]) == data[1, 3]
    point = read_report(tmp_path / "s_sweep_001.txt")
    assert point == rep | {"model": "dimer"}


def test_sweep_empty_range(tmp_path):
    assert run(tmp_path, "sweep", "--model", "dimer", "--methods", "quantum-spectral,classical-rca",
               "--k-values", "") == 0
    assert (tmp_path / "run_sweep.csv").read_text() == "k,rca_validity_ratio,splitting_error,max_population_diff\n"


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[model]\nname = ring\nn = 4\nepsilon = 1\nv = 0.1\n"
        "[run]\nmethods = quantum-spectral\n"
        "[plan]\nsamples = 11\nt_end = 5\n"
        f"[output]\nprefix = {tmp_path / 'fromfile'}\n"
    )
    assert cli.main(["evolve", "--config", str(cfg)]) == 0
    header, data = read_csv(tmp_path / "fromfile_quantum-spectral.csv")
    assert data.shape[0] == 11 and header.count("pop_3") == 1
    assert cli.main(["evolve", "--config", str(cfg), "--samples", "6", "--out", str(tmp_path / "flag")]) == 0
    _, data = read_csv(tmp_path / "flag_quantum-spectral.csv")
    assert data.shape[0] == 6


def test_dense_and_lc_models(tmp_path):
    cfg = tmp_path / "dense.ini"
    cfg.write_text("[model]\nname = dense\nmatrix = 1 0.01 0; 0.01 1.1 0.02; 0 0.02 0.9\n")
    assert cli.main(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "d")]) == 0
    assert run(tmp_path, "spectrum", "--model", "lc", "--inductance", "1", "--capacitance", "1",
               "--coupling-capacitance", "0.02") == 0
    rep = read_report(tmp_path / "run_spectrum.txt")
    assert float(rep["eigenvalue_0"]) == pytest.approx(0.99)


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--model", "dimer", "--epsilon", "1", "--v", "2"],
        ["spectrum", "--model", "ring", "--n", "2", "--v", "0.1"],
        ["evolve", "--methods", "quantum-spectral", "--gamma", "0.01"],
        ["evolve", "--methods", "bogus"],
        ["evolve", "--initial-state", "5"],
        ["compare", "--methods", "quantum-spectral"],
        ["sweep", "--model", "ring", "--n", "4", "--methods", "quantum-spectral,classical-rca"],
        ["evolve", "--samples", "0"],
    ],
)
def test_config_errors_exit_2(tmp_path, argv, capsys):
    assert run(tmp_path, *argv) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["spectrum", "--config", str(tmp_path / "nope.ini")]) == 2


def test_numeric_failure_exit_3_removes_partials(tmp_path, monkeypatch):
    calls = []
    original = cli.run_method

    def flaky(method, *a, **kw):
        calls.append(method)
        if len(calls) == 2:
            raise ConvergenceError("injected")
        return original(method, *a, **kw)

    monkeypatch.setattr(cli, "run_method", flaky)
    code = run(tmp_path, "evolve", "--methods", "quantum-spectral,classical-exact", "--v", "0.005",
               "--samples", "11")
    assert code == 3
    assert list(tmp_path.iterdir()) == []


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qcmap", "spectrum", "--v", "0.005", "--out", str(tmp_path / "m")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().endswith("m_spectrum.txt")
