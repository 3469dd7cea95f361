import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from kdspin import LaserConfig, Setup, frequencies
from kdspin.cli import load_config_file, main
from kdspin.dirac import Numerics
from kdspin.sweeps import compare, effective_series, sweep_eta
from kdspin.timeseries import CSV_COLUMNS, TimeSeries, export, read_csv

LAM = 3.0
CYCLE = LaserConfig(e_hat=1.0, lam=LAM, eta=0.0).cycle


def small_series():
    ts = np.array([0.0, 1.0, 2.0])
    return TimeSeries(
        times=ts,
        columns={
            "p_m1_up": np.array([1.0, 0.5, 0.25]),
            "p_p1_up": np.array([0.0, 0.5, 0.75]),
            "s_m1": np.array([0.5, np.nan, 0.5]),
            "norm": np.ones(3),
        },
        metadata={"solver": "test"},
    )


class TestTimeSeries:
    def test_schema_and_roundtrip(self, tmp_path):
        path = tmp_path / "out.csv"
        export(small_series(), path)
        text = path.read_text().splitlines()
        assert text[0] == ",".join(CSV_COLUMNS)
        # missing observables are empty fields, undefined spins literal nan
        row1 = text[2].split(",")
        assert row1[CSV_COLUMNS.index("p_m1_dn")] == ""
        assert row1[CSV_COLUMNS.index("s_m1")] == "nan"
        back = read_csv(path)
        assert np.array_equal(back.times, [0.0, 1.0, 2.0])
        assert np.array_equal(back.column("p_m1_up"), [1.0, 0.5, 0.25])
        assert np.isnan(back.column("s_m1")[1])
        meta = json.loads((tmp_path / "out.csv.meta.json").read_text())
        assert meta["solver"] == "test"

    def test_export_byte_stable(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        export(small_series(), a)
        export(small_series(), b)
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_nonincreasing_times(self):
        with pytest.raises(ValueError):
            TimeSeries(times=np.array([0.0, 0.0]), columns={})

    def test_io_error_carries_path(self, tmp_path):
        with pytest.raises(OSError, match="missing"):
            export(small_series(), tmp_path / "missing" / "out.csv")


class TestConfigFile:
    def test_parse_and_types(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text(
            "# flagship point\n"
            "e_hat_au = 400.0\n"
            "lambda_au = 3.0\n"
            "eta_rad = 1.5707963267948966\n"
            "setup = corotating\n"
            "delta_t_cycles = 5\n"
            "total_time_au = 0.5\n"
            "n_grid = 64\n"
            "steps_per_cycle = 500\n"
            "initial_mode = -1\n"
            "initial_spin = up\n"
            "solver = dirac\n"
            "protocol = instantaneous\n"
        )
        cfg = load_config_file(str(p))
        assert cfg["e_hat_au"] == 400.0
        assert cfg["n_grid"] == 64
        assert cfg["setup"] == "corotating"

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("wavelength = 3\n")
        with pytest.raises(ValueError):
            load_config_file(str(p))


class TestCompare:
    def test_zero_field_exact_agreement(self):
        # deviation floor is the split-step interband wobble (~5e-8 here)
        cfg = LaserConfig(e_hat=0.0, lam=LAM, eta=0.0, delta_t=0.0, total_t=8 * CYCLE)
        report = compare(cfg, Numerics(n_grid=64, steps_per_cycle=2000))
        for name in ("p_m1_up", "p_m1_dn", "p_p1_up", "p_p1_dn", "s_total"):
            assert report.deviations[name][0] < 1e-6

    def test_flagship_short_window(self, flagship_cfg):
        # short corotating comparison; the full-length bound lives in the
        # acceptance suite
        cfg = LaserConfig(
            e_hat=400.0,
            lam=LAM,
            eta=math.pi / 2,
            setup=Setup.COROTATING,
            delta_t=5 * CYCLE,
            total_t=40 * CYCLE,
        )
        report = compare(cfg, Numerics(n_grid=64, steps_per_cycle=500))
        assert report.max_deviation(["p_m1_up", "p_m1_dn", "p_p1_up", "p_p1_dn"]) < 0.05
        assert report.deviations["s_total"][0] < 0.05

    def test_deviation_shrinks_with_field(self):
        # residual between the solvers is at least quadratic in the field:
        # halving e_hat cuts the probability deviation by >= ~4x
        # (measured 11x at these settings)
        devs = []
        for e_hat in (400.0, 200.0):
            f = frequencies(LaserConfig(e_hat=e_hat, lam=LAM, eta=math.pi / 2))
            cycles = int(math.ceil(2 * math.pi / f.omega2 / CYCLE))
            cfg = LaserConfig(
                e_hat=e_hat,
                lam=LAM,
                eta=math.pi / 2,
                setup=Setup.COROTATING,
                delta_t=5 * CYCLE,
                total_t=cycles * CYCLE,
            )
            rep = compare(cfg, Numerics(n_grid=64, steps_per_cycle=2000))
            devs.append(rep.max_deviation(["p_m1_up", "p_m1_dn", "p_p1_up", "p_p1_dn"]))
        assert devs[0] > 3.0 * devs[1]


class TestSweep:
    def test_effective_corotating_sweep(self):
        template = LaserConfig(e_hat=400.0, lam=LAM, eta=0.0, delta_t=0.0, total_t=math.inf)
        etas = [0.0, math.pi / 6, math.pi / 4, math.pi / 2]
        points = sweep_eta(template, etas, solver="effective", protocol="corotating_spin")
        assert [p.eta for p in points] == sorted(etas)
        assert points[0].degenerate  # eta = 0: flat spin series
        for p in points[1:]:
            assert p.error is None
            assert p.fitted[0] == pytest.approx(p.predicted[0], rel=5e-3)
            assert p.fitted[1] == pytest.approx(p.predicted[1], rel=5e-3)

    def test_effective_sweep_monotonicity(self):
        template = LaserConfig(e_hat=400.0, lam=LAM, eta=0.0, delta_t=0.0, total_t=math.inf)
        etas = [i * math.pi / 12 for i in range(1, 7)]
        spin = sweep_eta(template, etas, solver="effective", protocol="corotating_spin")
        fitted = [p.fitted[0] for p in spin]
        assert all(a < b for a, b in zip(fitted, fitted[1:]))
        rabi = sweep_eta(template, etas[:-1], solver="effective", protocol="antirotating_rabi")
        fitted = [p.fitted[0] for p in rabi]
        assert all(a > b for a, b in zip(fitted, fitted[1:]))

    def test_sweep_rejects_bad_eta(self):
        template = LaserConfig(e_hat=400.0, lam=LAM, eta=0.0, delta_t=0.0, total_t=math.inf)
        with pytest.raises(ValueError):
            sweep_eta(template, [4.0], solver="effective")

    def test_failing_point_recorded(self):
        template = LaserConfig(e_hat=400.0, lam=LAM, eta=0.0, delta_t=0.0, total_t=math.inf)
        points = sweep_eta(template, [0.5], solver="nonexistent", protocol="corotating_spin")
        assert points[0].error is not None
        assert points[0].fitted == ()


class TestCli:
    def test_bounds_subcommand(self, capsys):
        rc = main(["bounds", "--omega-au", "286.988", "--cycles", "1000", "--e-hat-au", "400"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "lower_e_hat_au = 108.7" in out
        assert "contains_e_hat = True" in out

    def test_bounds_requires_frequency(self, capsys):
        rc = main(["bounds", "--cycles", "10"])
        assert rc == 1

    def test_simulate_effective_and_schema(self, tmp_path, capsys):
        out = tmp_path / "series.csv"
        rc = main(
            [
                "simulate",
                "--solver",
                "effective",
                "--e-hat-au",
                "400",
                "--lambda-au",
                "3",
                "--eta-rad",
                "0.5",
                "--setup",
                "antirotating",
                "--total-time-au",
                "4.0",
                "--steps-per-cycle",
                "100",
                "--sample-stride",
                "100",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        series = read_csv(out)
        f = frequencies(LaserConfig(e_hat=400.0, lam=3.0, eta=0.5))
        expect = np.cos(f.omega2 * math.cos(0.5) * series.times) ** 2
        assert np.allclose(series.column("p_m1_up"), expect, atol=1e-12)

    def test_simulate_dirac_deterministic_bytes(self, tmp_path):
        args = [
            "simulate",
            "--e-hat-au",
            "400",
            "--lambda-au",
            "3",
            "--eta-rad",
            "1.5707963267948966",
            "--delta-t-cycles",
            "1",
            "--total-time-au",
            str(4 * CYCLE),
            "--n-grid",
            "64",
            "--steps-per-cycle",
            "300",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert read_csv(a).column("norm") == pytest.approx(1.0, abs=1e-10)

    def test_simulate_rejects_missing_parameters(self, capsys):
        rc = main(["simulate", "--e-hat-au", "400", "--out", "x.csv"])
        assert rc == 1

    def test_simulate_rejects_bad_physics(self, tmp_path):
        rc = main(
            [
                "simulate",
                "--e-hat-au",
                "-4",
                "--lambda-au",
                "3",
                "--total-time-au",
                "1.0",
                "--out",
                str(tmp_path / "x.csv"),
            ]
        )
        assert rc == 1

    def test_io_failure_exit_code(self, tmp_path):
        rc = main(
            [
                "simulate",
                "--solver",
                "effective",
                "--e-hat-au",
                "400",
                "--lambda-au",
                "3",
                "--total-time-au",
                "1.0",
                "--steps-per-cycle",
                "50",
                "--out",
                str(tmp_path / "no" / "dir" / "x.csv"),
            ]
        )
        assert rc == 2

    def test_compare_subcommand(self, tmp_path, capsys):
        prefix = tmp_path / "cmp"
        rc = main(
            [
                "compare",
                "--e-hat-au",
                "400",
                "--lambda-au",
                "3",
                "--eta-rad",
                "1.5707963267948966",
                "--delta-t-cycles",
                "1",
                "--total-time-au",
                str(10 * CYCLE),
                "--n-grid",
                "64",
                "--steps-per-cycle",
                "300",
                "--out",
                str(prefix),
            ]
        )
        assert rc == 0
        assert (tmp_path / "cmp.dirac.csv").exists()
        assert (tmp_path / "cmp.effective.csv").exists()
        assert "p_m1_up" in capsys.readouterr().out

    def test_sweep_eta_subcommand(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(
            [
                "sweep-eta",
                "--solver",
                "effective",
                "--e-hat-au",
                "400",
                "--lambda-au",
                "3",
                "--etas",
                "0.5235987755982988,1.5707963267948966",
                "--sweep-protocol",
                "corotating_spin",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("eta_rad,fitted_a")
        assert len(lines) == 3

    def test_console_entry_point(self):
        env = dict(os.environ)
        proc = subprocess.run(
            [sys.executable, "-m", "kdspin.cli", "bounds", "--lambda-au", "3", "--cycles", "1000"],
            capture_output=True,
            text=True,
            env=env,
        )
        assert proc.returncode == 0
        assert "lower_e_hat_au" in proc.stdout
