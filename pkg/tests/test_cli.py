import json

import numpy as np
import pytest

from app.main import build_parser, main
from app.services.oam_analysis import envelope_contrast
from app.shared.constants import DesignDefaults, ExitCodes, Figure2Defaults, Figure3Defaults
from app.utils.csv_writer import PROVENANCE_FILE, read_table


def provenance(out_dir):
    return json.loads((out_dir / PROVENANCE_FILE).read_text(encoding="utf-8"))


def run_twice(tmp_path, argv):
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        assert main([*argv, "--out", str(out)]) == ExitCodes.SUCCESS
    return first, second


def assert_same_bytes(first, second, pattern):
    names = sorted(p.name for p in first.glob(pattern))
    assert names
    assert names == sorted(p.name for p in second.glob(pattern))
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


class TestFigure1:
    def test_reruns_and_contrast(self, tmp_path):
        first, second = run_twice(tmp_path, ["figure1", "--set", "z_points=201"])
        assert_same_bytes(first, second, "figure1_*.csv")
        summary = provenance(first)["summary"]
        # 고리 개구는 폭이 좁아 후반부 대비가 더 오래 남는다
        assert summary["contrast_annulus_and_pinhole"] > summary["contrast_two_pinholes"]
        rows = read_table(first / "figure1_annulus_and_pinhole.csv")
        assert rows.shape == (201, 4)
        assert envelope_contrast(rows[:, 1]) == pytest.approx(summary["contrast_annulus_and_pinhole"], rel=1e-6)
        assert rows[0, 1] < 1e-8


class TestFigure3:
    def test_reruns_are_byte_identical(self, tmp_path):
        first, second = run_twice(tmp_path, ["figure3"])
        assert_same_bytes(first, second, "figure3.csv")
        rows = read_table(first / "figure3.csv")
        shape = (len(Figure3Defaults.SIGMA_Y), len(Figure3Defaults.R))
        A1, log_sigma = rows[:, 2].reshape(shape), rows[:, 3].reshape(shape)
        assert np.all(np.diff(A1, axis=1) > 0)
        assert np.all(np.diff(log_sigma, axis=1) < 0)


class TestFigure4:
    def test_reruns_and_raised_shift(self, tmp_path):
        first, second = run_twice(tmp_path, ["figure4"])
        assert_same_bytes(first, second, "figure4_*.csv")
        summary = provenance(first)["summary"]
        assert summary["centroid_x_unraised"] == pytest.approx(0.0, abs=1e-8)
        assert summary["centroid_x_raised"] < summary["centroid_x_unraised"] - 0.5


class TestVoltage:
    def test_one_degree(self, tmp_path, capsys):
        out = tmp_path / "voltage"
        assert main(["voltage", "--alpha", "1deg", "--out", str(out)]) == ExitCodes.SUCCESS
        rows = read_table(out / "voltage.csv")
        assert rows.shape == (1, 3)
        assert rows[0, 1] == pytest.approx(1.0)
        assert rows[0, 2] == pytest.approx(88.4e9, rel=5e-3)
        assert str(out / "voltage.csv") in capsys.readouterr().out

    def test_missing_alpha(self, tmp_path, capsys):
        out = tmp_path / "voltage"
        assert main(["voltage", "--out", str(out)]) == ExitCodes.CONFIG_ERROR
        err = capsys.readouterr().err
        assert "error[MISSING_KEY]" in err
        assert "voltage.alpha" in err
        assert not out.exists()

    def test_csv_preamble(self, tmp_path):
        out = tmp_path / "voltage"
        main(["voltage", "--alpha", "0.1deg", "--out", str(out)])
        lines = (out / "voltage.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# format: csv-1"
        assert lines[2].startswith("# config_hash: ")
        assert lines[4] == "# units: alpha=rad,alpha_deg=deg,voltage=V"
        assert lines[5] == "alpha[rad],alpha_deg[deg],voltage[V]"
        assert len(lines) == 7


class TestFigure2:
    def test_peak_near_critical_angle(self, tmp_path):
        out = tmp_path / "figure2"
        assert main(["figure2", "--set", "theta_points=400", "--out", str(out)]) == ExitCodes.SUCCESS
        summary = provenance(out)["summary"]
        optimum = Figure2Defaults.EXPECTED_OPTIMUM_DEG
        assert 0.5 * optimum <= summary["peak_angle_deg"] <= 2.0 * optimum
        assert summary["critical_angle_deg"] == pytest.approx(summary["peak_angle_deg"], rel=0.05)
        rows = read_table(out / "figure2.csv")
        assert rows.shape == (400, 3)
        assert np.all((rows[:, 1:] >= 0) & (rows[:, 1:] <= 1 + 1e-12))

    def test_reruns_are_byte_identical(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        for out in (first, second):
            assert main(["figure2", "--set", "theta_points=200", "--seed", "3", "--out", str(out)]) == 0
        assert (first / "figure2.csv").read_bytes() == (second / "figure2.csv").read_bytes()
        assert provenance(first)["config_hash"] == provenance(second)["config_hash"]

    def test_plot_script(self, tmp_path):
        out = tmp_path / "figure2"
        main(["figure2", "--set", "theta_points=20", "--plot-script", "--out", str(out)])
        script = (out / "plot_figure2.py").read_text(encoding="utf-8")
        assert "figure2.csv" in script
        assert "matplotlib" in script


class TestProvenance:
    def test_contents(self, tmp_path):
        out = tmp_path / "design"
        assert main(["design", "--seed", "7", "--out", str(out)]) == 0
        prov = provenance(out)
        assert prov["command"] == "design"
        assert prov["rng_seed"] == 7
        assert len(prov["config_hash"]) == 64
        assert prov["files"] == ["design.csv"]
        assert "design" in prov["step_times_ms"]

    def test_design_table(self, tmp_path):
        out = tmp_path / "design"
        main(["design", "--out", str(out)])
        rows = read_table(out / "design.csv")
        np.testing.assert_allclose(rows[:, 0], [1e7, 1e8])
        lo, hi = DesignDefaults.NOMINAL_AMPLITUDE_RANGE
        assert np.all((rows[:, 3] >= lo / 2.5) & (rows[:, 3] <= hi * 2.5))


class TestFailures:
    def test_numeric_failure_removes_output(self, tmp_path, capsys):
        out = tmp_path / "figure4"
        assert main(["figure4", "--set", "figure4.x_points=3", "--out", str(out)]) == ExitCodes.NUMERIC_ERROR
        assert "error[UNDER_RESOLVED]" in capsys.readouterr().err
        assert not out.exists()

    def test_unknown_key(self, tmp_path, capsys):
        assert main(["figure2", "--set", "bogus=1", "--out", str(tmp_path / "x")]) == ExitCodes.CONFIG_ERROR
        assert "figure2.bogus" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["design", "--config", str(tmp_path / "nope.conf"), "--out", str(tmp_path / "x")])
        assert code == ExitCodes.CONFIG_ERROR
        assert "CONFIG_NOT_FOUND" in capsys.readouterr().err

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["figure9"])
        assert exc.value.code == 2


class TestConfigFile:
    def test_config_file_values(self, tmp_path):
        conf = tmp_path / "design.conf"
        conf.write_text("# 설계점\ndesign.E = [2e7, 5e7]\nL = 2.0\n", encoding="utf-8")
        out = tmp_path / "design"
        assert main(["design", "--config", str(conf), "--out", str(out)]) == 0
        rows = read_table(out / "design.csv")
        np.testing.assert_allclose(rows[:, 0], [2e7, 5e7])
        np.testing.assert_allclose(rows[:, 1], [2.0, 2.0])

    def test_output_dir_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ETWIST_OUTPUT_DIR", str(tmp_path / "results"))
        assert main(["design"]) == 0
        assert (tmp_path / "results" / "design" / "design.csv").exists()


class TestSweep:
    def test_points_and_index(self, tmp_path):
        conf = tmp_path / "sweep.conf"
        conf.write_text("sweep.target = design\nsweep.E = [1e7, 1e8]\n", encoding="utf-8")
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", str(conf), "--out", str(out)]) == 0
        assert (out / "point_000" / "design.csv").exists()
        assert (out / "point_001" / "design.csv").exists()
        index = read_table(out / "sweep_index.csv")
        np.testing.assert_allclose(index, [[0, 1e7], [1, 1e8]])
        assert read_table(out / "point_001" / "design.csv")[0, 0] == pytest.approx(1e8)
        assert provenance(out)["summary"]["points"] == 2
