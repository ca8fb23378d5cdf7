"""risangle command line: frequency/angle sweeps, deflection design, reciprocity scans."""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from risangle.array import ColumnProfile
from risangle.circuit import PF, reflection_coefficient
from risangle.config import RunConfig, inclusive_range, load_config, with_overrides
from risangle.csvio import fmt, write_csv
from risangle.errors import ConfigError, RealizationError, RisError
from risangle.pattern import far_field_cut, write_cut_csv
from risangle.reciprocity import cells_within, reciprocity_scan, reciprocity_window, write_scan_csv
from risangle.steering import (
    PhaseInverter,
    design_deflection,
    read_design_csv,
    realize_profile,
    realized_profile,
    write_design_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

FREQ_HEADER = ["freq_GHz", "phase_deg", "amplitude"]
ANGLE_HEADER = ["angle_deg", "phase_deg", "amplitude"]
RANGE_HEADER = ["angle_deg", "phase_lo_deg", "phase_hi_deg", "width_deg"]


def _tag(x):
    return f"{x:g}"


def cmd_sweep_frequency(cfg: RunConfig, out: Path) -> list[Path]:
    model = cfg.model()
    freqs = np.array(cfg.frequencies())
    written = []
    for ang in cfg.angles_deg:
        for cap_pf in cfg.capacitances_pf:
            g = reflection_coefficient(math.radians(ang), freqs, cap_pf * PF, model)
            rows = zip(freqs / 1e9, np.degrees(np.angle(g)), np.abs(g))
            path = out / f"phase_vs_freq_{_tag(ang)}deg_{_tag(cap_pf)}pF.csv"
            written.append(write_csv(path, FREQ_HEADER, rows))
    return written


def _sweep_angles(cfg):
    return inclusive_range(cfg.angle_start_deg, cfg.angle_stop_deg, cfg.angle_step_deg)


def cmd_sweep_angle(cfg: RunConfig, out: Path) -> list[Path]:
    model = cfg.model()
    freq = cfg.freq_ghz * 1e9
    angles = _sweep_angles(cfg)
    written = []
    for cap_pf in cfg.capacitances_pf:
        rows = []
        for ang in angles:
            g = reflection_coefficient(math.radians(ang), freq, cap_pf * PF, model)
            rows.append((ang, math.degrees(np.angle(g)), abs(g)))
        written.append(write_csv(out / f"phase_vs_angle_{_tag(cap_pf)}pF.csv", ANGLE_HEADER, rows))
    rows = []
    for ang in angles:
        lo, hi, width = PhaseInverter(model, math.radians(ang), freq).phase_range
        rows.append((ang, math.degrees(lo), math.degrees(hi), math.degrees(width)))
    written.append(write_csv(out / "tunable_range_vs_angle.csv", RANGE_HEADER, rows))
    return written


def cmd_design(cfg: RunConfig, out: Path, theta_in_deg=None, theta_out_deg=None):
    """Returns ``(paths, peak_angle_rad, design, ok)``; ``ok`` is False when too many columns are infeasible."""
    theta_in = math.radians(cfg.theta_in_deg if theta_in_deg is None else theta_in_deg)
    theta_out = math.radians(cfg.theta_out_deg if theta_out_deg is None else theta_out_deg)
    model = cfg.model()
    geom = cfg.geometry()
    design = design_deflection(geom, theta_in, theta_out)
    ok = True
    try:
        design = realize_profile(model, design, geom, cfg.max_infeasible_fraction)
    except RealizationError as exc:
        design, ok = exc.design, False
    profile = realized_profile(model, design, theta_in, geom.freq)
    cut = far_field_cut(profile, geom, theta_in, math.radians(cfg.grid_step_deg))
    paths = [
        write_design_csv(design, out / "design.csv"),
        write_cut_csv(cut, out / "far_field.csv"),
    ]
    return paths, cut.peak_angle, design, ok


def cmd_pattern(cfg: RunConfig, out: Path, profile_path=None, illumination_deg=None):
    """Far-field cut of a realized profile (from ``profile_path`` or designed from the config)."""
    model = cfg.model()
    geom = cfg.geometry()
    if profile_path is not None:
        _, caps, _ = read_design_csv(profile_path)
        if caps.size != geom.n_columns:
            raise ConfigError(f"profile has {caps.size} columns, config n_columns = {geom.n_columns}")
        holder = design_deflection(geom, 0.0, 0.0)
        holder.profile = ColumnProfile(holder.profile.phases, capacitances=caps)
    else:
        holder = design_deflection(geom, math.radians(cfg.theta_in_deg), math.radians(cfg.theta_out_deg))
        holder = realize_profile(model, holder, geom, 1.0)
    if illumination_deg is None:
        illumination_deg = cfg.illumination_deg if cfg.illumination_deg is not None else cfg.theta_in_deg
    illum = math.radians(illumination_deg)
    profile = realized_profile(model, holder, illum, geom.freq)
    cut = far_field_cut(profile, geom, illum, math.radians(cfg.grid_step_deg))
    path = write_cut_csv(cut, out / f"pattern_{_tag(illumination_deg)}deg.csv")
    return [path], cut.peak_angle


def cmd_reciprocity(cfg: RunConfig, out: Path, threshold_deg=None):
    model = cfg.model()
    geom = cfg.geometry()
    t1 = np.radians(cfg.theta1_deg)
    t2 = np.radians(cfg.theta2_deg)
    reports = reciprocity_scan(model, geom, t1, t2, max_infeasible_fraction=cfg.max_infeasible_fraction)
    threshold = math.radians(cfg.threshold_deg if threshold_deg is None else threshold_deg)
    window = reciprocity_window(reports, threshold)
    within = cells_within(reports, threshold)
    cells = [r for row in reports for r in row]
    diagonal = [r for r in cells if r.theta1 == r.theta2]
    summary = {
        "threshold_deg": math.degrees(threshold),
        "window_half_width_deg": math.degrees(window) if window is not None else float("nan"),
        "cells_total": len(cells),
        "cells_within": len(within),
        "cells_infeasible": sum(1 for r in cells if not r.feasible),
        "cells_evanescent": sum(1 for r in cells if r.evanescent),
        "diagonal_cells": len(diagonal),
        "diagonal_within": sum(1 for r in diagonal if r in within),
    }
    text = "".join(f"{k} = {fmt(v)}\n" for k, v in summary.items())
    paths = [write_scan_csv(reports, out / "reciprocity_scan.csv")]
    summary_path = out / "reciprocity_summary.txt"
    summary_path.write_bytes(text.encode("ascii"))
    paths.append(summary_path)
    return paths, summary


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value run configuration")
    common.add_argument("--out", type=Path, help="output directory (default from config, else ./out)")
    common.add_argument("--calibration", type=Path, help="calibration CSV (default: bundled table)")
    common.add_argument("--strict-angles", action="store_true", default=None,
                        help="error instead of clamping outside the calibration span")

    parser = argparse.ArgumentParser(prog="risangle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep-freq", parents=[common], help="phase/amplitude versus frequency")
    sub.add_parser("sweep-angle", parents=[common], help="phase versus incidence angle at the operating frequency")
    p = sub.add_parser("design", parents=[common], help="deflection design and its far-field cut")
    p.add_argument("--theta-in", type=float, help="incidence angle, degrees")
    p.add_argument("--theta-out", type=float, help="target reflection angle, degrees")
    p = sub.add_parser("reciprocity", parents=[common], help="reverse-incidence deviation scan")
    p.add_argument("--threshold", type=float, help="deviation threshold for the window, degrees")
    p = sub.add_parser("pattern", parents=[common], help="far-field cut of a realized profile")
    p.add_argument("--profile", type=Path, help="design CSV to illuminate (default: design from config)")
    p.add_argument("--illumination", type=float, help="illumination angle, degrees")
    return parser


def _configure(args) -> tuple[RunConfig, Path]:
    cfg = load_config(args.config) if args.config else RunConfig()
    cfg = with_overrides(cfg, calibration=args.calibration, strict_angles=args.strict_angles)
    out = args.out if args.out is not None else cfg.out
    cfg.validate()
    return cfg, out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, out = _configure(args)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "sweep-freq":
            paths = cmd_sweep_frequency(cfg, out)
        elif args.command == "sweep-angle":
            paths = cmd_sweep_angle(cfg, out)
        elif args.command == "design":
            paths, peak, design, ok = cmd_design(cfg, out, args.theta_in, args.theta_out)
            print(f"peak angle: {math.degrees(peak):.4f} deg")
            print(f"infeasible columns: {design.n_infeasible}/{len(design.profile)}")
            if not ok:
                for p in paths:
                    print(p)
                print("error: too many infeasible columns; partial design written", file=sys.stderr)
                return EXIT_INFEASIBLE
        elif args.command == "reciprocity":
            paths, summary = cmd_reciprocity(cfg, out, args.threshold)
            print(f"reciprocity window half-width: {summary['window_half_width_deg']:g} deg "
                  f"(threshold {summary['threshold_deg']:g} deg)")
        else:
            paths, peak = cmd_pattern(cfg, out, args.profile, args.illumination)
            print(f"peak angle: {math.degrees(peak):.4f} deg")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
