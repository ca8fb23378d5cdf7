from pathlib import Path

import numpy as np
import pytest

from conftest import CALIBRATION_ROWS
from risangle.circuit import CalibrationTable, CircuitParams, write_calibration_csv
from risangle.cli import main
from risangle.config import RunConfig, inclusive_range, load_config, parse_config_text, parse_list
from risangle.csvio import read_csv
from risangle.errors import ConfigError
from risangle.pattern import read_cut_csv
from risangle.reciprocity import read_scan_csv
from risangle.steering import read_design_csv

GOLDEN = Path(__file__).parent / "golden"
COMMANDS = ["sweep-freq", "sweep-angle", "design", "reciprocity", "pattern"]


def run(tmp_path, *args, config_text=None, name="run.cfg"):
    argv = list(args)
    if config_text is not None:
        cfg = tmp_path / name
        cfg.write_text(config_text)
        argv += ["--config", str(cfg)]
    return main(argv + ["--out", str(tmp_path / "out")])


@pytest.fixture
def flat_calibration(tmp_path):
    p = CircuitParams.from_display_units(*CALIBRATION_ROWS[0][1:5])
    return write_calibration_csv(CalibrationTable.single(p), tmp_path / "flat.csv")


class TestGolden:
    @pytest.mark.parametrize("command", COMMANDS)
    def test_matches_checked_in_output(self, command, tmp_path):
        out = tmp_path / command
        assert main([command, "--config", str(GOLDEN / "golden.cfg"), "--out", str(out)]) == 0
        expected = sorted((GOLDEN / "expected" / command).iterdir())
        assert sorted(p.name for p in out.iterdir()) == [p.name for p in expected]
        for p in expected:
            assert (out / p.name).read_bytes() == p.read_bytes(), p.name


class TestConfig:
    def test_ranges(self):
        assert parse_list("-10:10:5") == [-10.0, -5.0, 0.0, 5.0, 10.0]
        assert parse_list("1, 2.5") == [1.0, 2.5]
        assert len(inclusive_range(4.0, 7.0, 0.001)) == 3001

    def test_relative_paths_follow_config(self, tmp_path):
        cfg = tmp_path / "sub" / "a.cfg"
        cfg.parent.mkdir()
        cfg.write_text("out = results\n")
        assert load_config(cfg).out == tmp_path / "sub" / "results"

    @pytest.mark.parametrize("text", ["bogus = 1", "n_columns", "angles_deg =", "freq_step_ghz = -1",
                                      "angle_stop_deg = 95", "capacitances_pf = 0"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_config_text(text).validate()

    def test_defaults_valid(self):
        assert RunConfig().validate().geometry().n_columns == 64


class TestExitCodes:
    def test_empty_angle_list(self, tmp_path):
        assert run(tmp_path, "sweep-freq", config_text="angles_deg =\n") == 2

    def test_missing_calibration(self, tmp_path):
        assert run(tmp_path, "sweep-freq", "--calibration", str(tmp_path / "nope.csv")) == 2

    def test_missing_config(self, tmp_path):
        assert main(["design", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_strict_angles_outside_span(self, tmp_path):
        assert run(tmp_path, "sweep-angle", "--strict-angles", config_text="angle_stop_deg = 45\n") == 2

    def test_output_is_a_file(self, tmp_path):
        target = tmp_path / "occupied"
        target.write_text("")
        assert main(["sweep-freq", "--out", str(target)]) == 4

    def test_infeasible_design(self, tmp_path, capsys):
        code = run(tmp_path, "design", "--theta-out", "89.9", config_text="max_infeasible_fraction = 0\n")
        assert code == 3
        assert (tmp_path / "out" / "design.csv").is_file()
        _, _, feasible = read_design_csv(tmp_path / "out" / "design.csv")
        assert not feasible.all()
        assert "infeasible" in capsys.readouterr().err


class TestSweeps:
    def test_frequency_zero_crossings(self, tmp_path):
        assert run(tmp_path, "sweep-freq") == 0
        for ang, *_rest, fr in CALIBRATION_ROWS:
            rows = read_csv(tmp_path / "out" / f"phase_vs_freq_{ang:g}deg_0.63pF.csv", ["freq_GHz", "phase_deg", "amplitude"])
            f = np.array([float(r[0]) for r in rows])
            ph = np.array([float(r[1]) for r in rows])
            idx = [i for i in np.flatnonzero(np.diff(np.sign(ph)) != 0) if abs(ph[i]) < 90]
            assert idx
            assert abs(f[idx[0]] - fr) <= 0.01 * fr

    def test_angle_rows_and_gaps(self, tmp_path):
        cfg = "angle_stop_deg = 45\ncapacitances_pf = 0.63, 1.14, 2.67\n"
        assert run(tmp_path, "sweep-angle", config_text=cfg) == 0
        curves = {}
        for c in ("0.63", "1.14", "2.67"):
            rows = read_csv(tmp_path / "out" / f"phase_vs_angle_{c}pF.csv", ["angle_deg", "phase_deg", "amplitude"])
            assert len(rows) == 46
            curves[c] = np.array([float(r[1]) for r in rows])

        def drift(a, b, i):
            gap = (curves[a] - curves[b]) % 360
            return abs(gap[i] - gap[0])

        for a, b in (("0.63", "1.14"), ("1.14", "2.67"), ("0.63", "2.67")):
            assert drift(a, b, 40) > 0.1
            assert drift(a, b, 10) < drift(a, b, 40)
        rng = read_csv(tmp_path / "out" / "tunable_range_vs_angle.csv",
                       ["angle_deg", "phase_lo_deg", "phase_hi_deg", "width_deg"])
        assert len(rng) == 46

    def test_single_knot_is_flat(self, tmp_path, flat_calibration):
        assert run(tmp_path, "sweep-angle", "--calibration", str(flat_calibration)) == 0
        rows = read_csv(tmp_path / "out" / "phase_vs_angle_0.63pF.csv", ["angle_deg", "phase_deg", "amplitude"])
        assert len(rows) == 90
        assert len({r[1] for r in rows}) == 1 and len({r[2] for r in rows}) == 1


class TestDesignAndPattern:
    def test_specular_design(self, tmp_path, capsys):
        assert run(tmp_path, "design", "--theta-out", "0") == 0
        _, caps, feasible = read_design_csv(tmp_path / "out" / "design.csv")
        assert feasible.all() and np.unique(caps).size == 1
        assert "peak angle: 0.0000 deg" in capsys.readouterr().out

    def test_design_peak(self, tmp_path):
        assert run(tmp_path, "design") == 0
        ang, db = read_cut_csv(tmp_path / "out" / "far_field.csv")
        assert ang[np.argmax(db)] == pytest.approx(30.0, abs=0.1)

    def test_pattern_from_profile(self, tmp_path, capsys):
        assert run(tmp_path, "design") == 0
        prof = tmp_path / "out" / "design.csv"
        assert main(["pattern", "--profile", str(prof), "--illumination", "30", "--out", str(tmp_path / "p")]) == 0
        assert (tmp_path / "p" / "pattern_30deg.csv").is_file()
        # illuminated from the steered direction, the beam returns near broadside
        line = [l for l in capsys.readouterr().out.splitlines() if l.startswith("peak angle")][-1]
        assert abs(float(line.split()[2])) < 2.0

    def test_profile_size_mismatch(self, tmp_path):
        assert run(tmp_path, "design") == 0
        prof = tmp_path / "out" / "design.csv"
        assert main(["pattern", "--profile", str(prof), "--out", str(tmp_path / "p"),
                     "--config", str(GOLDEN / "golden.cfg")]) == 0
        cfg = tmp_path / "small.cfg"
        cfg.write_text("n_columns = 8\n")
        assert main(["pattern", "--profile", str(prof), "--config", str(cfg), "--out", str(tmp_path / "q")]) == 2


class TestReciprocityCommand:
    CFG = "theta1_deg = -20:20:10\ntheta2_deg = -20:20:10\n"

    def summary(self, path):
        pairs = (l.split(" = ") for l in path.read_text().splitlines())
        return {k: v for k, v in pairs}

    def test_single_knot_window_is_whole_grid(self, tmp_path, flat_calibration):
        assert run(tmp_path, "reciprocity", "--calibration", str(flat_calibration), config_text=self.CFG) == 0
        s = self.summary(tmp_path / "out" / "reciprocity_summary.txt")
        assert float(s["window_half_width_deg"]) == pytest.approx(20.0)
        assert s["cells_within"] == s["cells_total"] == "25"

    def test_zero_threshold(self, tmp_path):
        assert run(tmp_path, "reciprocity", "--threshold", "0", config_text=self.CFG) == 0
        s = self.summary(tmp_path / "out" / "reciprocity_summary.txt")
        assert float(s["window_half_width_deg"]) == 0.0
        assert s["diagonal_within"] == s["diagonal_cells"] == "5"
        rows = read_scan_csv(tmp_path / "out" / "reciprocity_scan.csv")
        zero = {(r["theta1_deg"], r["theta2_deg"]) for r in rows if r["deviation_deg"] == 0.0}
        # diagonal plus the specular anti-diagonal
        assert {(t, t) for t in (-20.0, -10.0, 0.0, 10.0, 20.0)} <= zero
        assert all(a == b or a == -b for a, b in zero)
