import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polaron_emission.cli import (
    SimConfig,
    config_to_text,
    format_number,
    parse_config,
    run_command,
    write_csv,
)
from polaron_emission.errors import ConfigurationError


class TestParseConfig:
    def test_empty_gives_defaults(self):
        cfg = parse_config("")
        assert cfg == SimConfig()
        assert cfg.drive.omega == 0.01 and cfg.drive.gamma == pytest.approx(1 / 700)
        assert (cfg.phonon.alpha, cfg.phonon.nu_c, cfg.phonon.temperature) == (0.03, 2.2, 4.0)
        assert cfg.detector.fwhm == 400.0

    def test_single_override(self):
        cfg = parse_config("# hotter\ntemperature_K = 15  # kelvin\n")
        assert cfg.phonon.temperature == 15.0
        assert cfg == SimConfig(phonon=cfg.phonon)

    def test_invariant_violation_names_key(self):
        with pytest.raises(ConfigurationError, match="alpha_ps2.*line 1"):
            parse_config("alpha_ps2 = -1")

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError, match="line 2.*bogus"):
            parse_config("alpha_ps2 = 0.01\nbogus = 3")

    def test_unparseable_number(self):
        with pytest.raises(ConfigurationError, match="line 1.*omega_psinv"):
            parse_config("omega_psinv = fast")

    def test_missing_equals(self):
        with pytest.raises(ConfigurationError, match="line 1"):
            parse_config("markovian")

    def test_booleans_and_auto(self):
        cfg = parse_config("markovian = yes\noptical_tau_max_ps = auto\nfreq_points = 101")
        assert cfg.markovian and cfg.grids.optical_tau_max is None and cfg.grids.freq_points == 101

    def test_echo_roundtrip(self):
        cfg = parse_config("temperature_K = 0\nmarkovian = true\noptical_tau_max_ps = 9000")
        assert parse_config(config_to_text(cfg)) == cfg


class TestCsv:
    def test_exact_format(self, tmp_path):
        path = tmp_path / "one.csv"
        write_csv(["col"], [[1.0]], path)
        assert path.read_bytes() == b"col\n1.000000000000e0\n"

    def test_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_csv(["a_ps", "b"], [], path)
        assert path.read_text() == "a_ps,b\n"

    def test_ragged_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(["a", "b"], [[1.0]], tmp_path / "x.csv")

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            write_csv(["a"], [[1.0]], tmp_path / "missing" / "x.csv")

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_number_roundtrip(self, x):
        text = format_number(x)
        assert "+" not in text
        assert float(text) == pytest.approx(x, rel=1e-12, abs=0)
        assert format_number(float(text)) == text

    def test_negative_exponent(self):
        assert format_number(-0.00125) == "-1.250000000000e-3"


class TestCommands:
    def test_phonon_info(self, tmp_path, capsys):
        out = tmp_path / "info.json"
        assert run_command(["phonon-info", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report[0]["one_minus_B2"] == pytest.approx(0.091, abs=0.005)
        assert (tmp_path / "info.config.txt").exists()
        assert "one_minus_B2" in capsys.readouterr().out

    def test_spectrum_markovian_and_determinism(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("freq_min_psinv = -10\nfreq_max_psinv = 10\nfreq_points = 2001\n")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert run_command(["spectrum", "--markovian", "--config", str(cfg), "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()
        data = np.loadtxt(a, delimiter=",", skiprows=1)
        assert a.read_text().splitlines()[0] == "delta_omega_psinv,S_total,S_zpl,S_sideband"
        assert data.shape == (2001, 4)
        assert np.all(data[:, 3] == 0)
        summary = json.loads((tmp_path / "a.summary.json").read_text())
        assert {"coherent_weight", "sideband_fraction"} <= set(summary)
        echoed = parse_config((tmp_path / "a.config.txt").read_text())
        assert echoed.markovian and echoed.grids.freq_points == 2001

    def test_spectrum_csv_reserialises_identically(self, tmp_path):
        out = tmp_path / "s.csv"
        cfg = tmp_path / "run.cfg"
        cfg.write_text("freq_points = 601\nfreq_min_psinv = -6\nfreq_max_psinv = 6\n")
        assert run_command(["spectrum", "--config", str(cfg), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
        again = tmp_path / "again.csv"
        write_csv(lines[0].split(","), rows, again)
        assert again.read_bytes() == out.read_bytes()

    def test_sweep_dip(self, tmp_path):
        out = tmp_path / "sweep.csv"
        argv = ["sweep-dip", "--s-min", "0.05", "--s-max", "20", "--s-points", "30", "--out", str(out)]
        assert run_command(argv) == 0
        data = np.loadtxt(out, delimiter=",", skiprows=1)
        assert data.shape == (30, 2)
        assert np.all(np.diff(data[:, 0]) > 0)

    def test_hom(self, tmp_path):
        out = tmp_path / "hom.csv"
        assert run_command(["hom", "--s", "1", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "tau_ps,g2_raw,g2_convolved"
        summary = json.loads((tmp_path / "hom.summary.json").read_text())
        assert summary["s"] == pytest.approx(1.0)

    def test_coherent_fraction_per_temperature(self, tmp_path):
        out = tmp_path / "cf.csv"
        assert run_command(["coherent-fraction", "--temps", "0,4", "--s-points", "4", "--out", str(out)]) == 0
        for T in ("0", "4"):
            data = np.loadtxt(tmp_path / f"cf_T{T}K.csv", delimiter=",", skiprows=1)
            assert data.shape == (4, 3)

    @pytest.mark.parametrize(
        "argv",
        [
            ["nonsense"],
            [],
            ["spectrum", "--bogus"],
            ["hom", "--s", "-1"],
            ["sweep-dip", "--s-min", "2", "--s-max", "1"],
            ["coherent-fraction", "--temps", "a,b"],
        ],
    )
    def test_usage_errors(self, argv, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert run_command(argv) == 2

    def test_bad_config_file(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("alpha_ps2 = -1\n")
        assert run_command(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2

    def test_numeric_failure(self, tmp_path):
        cfg = tmp_path / "zero.cfg"
        cfg.write_text("omega_psinv = 0\n")
        assert run_command(["hom", "--config", str(cfg), "--out", str(tmp_path / "h.csv")]) == 1
