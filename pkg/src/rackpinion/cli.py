"""Command-line entry point: ``rackpinion {simulate,sweep,cut,boundary,estimate}``.

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 integration
failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import config as cfgmod
from . import svg
from .analysis import (NotOscillatoryError, PHASE_ORDER, classify, clock_metrics,
                       count_phase_slips)
from .atlas import (BracketError, SweepSpec, default_workers, find_II0_boundary, phase_sequence,
                    sweep, velocity_cut)
from .estimates import DeviceSpec, estimate_report, preset, to_drive_point
from .integrator import IntegrationError, integrate
from .model import DrivePoint, SymmetricCase
from .serialize import dumps_json, write_csv, write_json
from .units import VELOCITY, UnitError, parse_quantity

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_INTEGRATION = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"rackpinion: {msg}", file=sys.stderr)


def _progress(enabled: bool):
    if not enabled:
        return None

    def report(done: int, total: int) -> None:
        if done == total or done % max(1, total // 20) == 0:
            print(f"  {done}/{total} cells", file=sys.stderr)
    return report


def _device(params: dict, preset_flag: str | None) -> DeviceSpec | None:
    name = preset_flag or params.get("preset")
    if name is not None and "device" in params:
        raise cfgmod.ConfigError("give either a device block or a preset, not both")
    try:
        if name is not None:
            return preset(name)
        if "device" in params:
            block = params["device"]
            if isinstance(block, str):
                return preset(block)
            if not isinstance(block, dict):
                raise cfgmod.ConfigError("device: expected a mapping or a preset name")
            return DeviceSpec.from_mapping(block)
    except (KeyError, UnitError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        raise cfgmod.ConfigError(f"device: {msg}") from None
    return None


def _initial_u0(params: dict) -> float:
    if "u0" in params and "x0_over_lambda" in params:
        raise cfgmod.ConfigError("give either u0 or x0_over_lambda, not both")
    if "x0_over_lambda" in params:
        return 2.0 * math.pi * cfgmod.parse_number(params["x0_over_lambda"], "x0_over_lambda")
    return cfgmod.parse_number(params.get("u0", 0.0), "u0")


def _drive_point(params: dict, device: DeviceSpec | None) -> DrivePoint:
    given = [k for k in ("point", "symmetric") if k in params] + (["device"] if device else [])
    if len(given) != 1:
        raise cfgmod.ConfigError("simulate needs exactly one of point, symmetric, device/preset")
    try:
        if device is not None:
            return to_drive_point(device)
        if "symmetric" in params:
            grip = cfgmod.parse_number(params["symmetric"].get("grip", 0.0), "symmetric.grip")
            return DrivePoint(grip / 2.0, grip / 2.0, 1.0)
        block = params["point"]
        return DrivePoint(cfgmod.parse_number(block.get("phi1", 0.0), "point.phi1"),
                          cfgmod.parse_number(block.get("phi2", 0.0), "point.phi2"),
                          cfgmod.parse_number(block.get("nu", 1.0), "point.nu"))
    except ValueError as exc:
        if isinstance(exc, cfgmod.ConfigError):
            raise
        raise cfgmod.ConfigError(str(exc)) from None


def cmd_simulate(run: cfgmod.RunConfig, args) -> int:
    params = run.params
    device = _device(params, args.preset)
    point = _drive_point(params, device)
    u0 = _initial_u0(params)
    horizon = cfgmod.parse_number(params.get("horizon", 4 * math.pi), "horizon")
    if not horizon > 0:
        raise cfgmod.ConfigError("horizon must be positive")

    traj = integrate(point, u0, horizon, run.integrator)
    label = classify(point, u0, run.tolerances)
    summary = {
        "point": {"phi1": point.phi1, "phi2": point.phi2, "nu": point.nu},
        "u0": u0,
        "horizon": horizon,
        "samples": len(traj),
        "window_mean_velocity": (traj.u[-1] - traj.u[0]) / traj.horizon,
        "phase_slips": {"rack1": count_phase_slips(traj, 1, 0.0),
                        "rack2": count_phase_slips(traj, 2, 0.0)},
        "classification": label.as_dict(),
    }
    if point.is_symmetric and abs(u0) < math.pi:
        summary["symmetric_grip"] = SymmetricCase(2 * point.phi1, u0).grip
    try:
        m = clock_metrics(traj, u0)
        summary["clock"] = {"frequency": m.frequency, "period": m.period,
                            "peak_amplitude": m.peak_amplitude, "squareness": m.squareness,
                            "amplification": m.amplification, "tangent_gain": m.tangent_gain}
        if device is not None:
            summary["clock"]["frequency_hz"] = m.frequency_hz(device.V1, device.wavelength)
    except NotOscillatoryError as exc:
        summary["clock"] = None
        summary["clock_note"] = str(exc)

    out = run.out_dir
    if device is not None:
        time_scale = device.wavelength / (2 * math.pi * device.V1)
        length_scale = device.wavelength / (2 * math.pi)
        header = ["t[s]", "x[m]"]
        xs, ys = traj.s * time_scale, traj.u * length_scale
        summary["device"] = device.as_dict()
        xlabel, ylabel = "t [s]", "x [m]"
    else:
        header = ["s", "u"]
        xs, ys = traj.s, traj.u
        xlabel, ylabel = "s = 2 pi V1 t / lambda", "u = 2 pi x / lambda"
    if "csv" in run.formats:
        write_csv(out / "trajectory.csv", header, zip(xs, ys))
    if "json" in run.formats:
        write_json(out / "summary.json", summary)
    if "svg" in run.formats:
        title = f"phi1={point.phi1:.4g}, phi2={point.phi2:.4g}, nu={point.nu:.4g}"
        (out / "trajectory.svg").write_text(
            svg.line_chart({f"u0={u0:.4g}": (xs, ys)}, title=title, xlabel=xlabel,
                           ylabel=ylabel), encoding="utf-8")
    print(dumps_json(summary), end="")
    return EXIT_OK


def _sweep_spec(run: cfgmod.RunConfig) -> SweepSpec:
    p = run.params
    try:
        return SweepSpec(
            cfgmod.parse_range(p.get("phi1", [0.5, 3.0, 60]), "phi1"),
            cfgmod.parse_range(p.get("nu", [0.5, 1.5, 60]), "nu"),
            cfgmod.parse_number(p.get("grip_offset", 0.05), "grip_offset"),
            cfgmod.parse_number(p.get("u0", 0.0), "u0"),
            run.tolerances)
    except ValueError as exc:
        if isinstance(exc, cfgmod.ConfigError):
            raise
        raise cfgmod.ConfigError(str(exc)) from None


def cmd_sweep(run: cfgmod.RunConfig, args) -> int:
    spec = _sweep_spec(run)
    trace = run.params.get("boundary", True)
    if not isinstance(trace, bool):
        raise cfgmod.ConfigError("boundary: expected true or false")
    pmap = sweep(spec, workers=args.workers, progress=_progress(args.progress),
                 trace_boundary=trace)
    out = run.out_dir
    rows = []
    for i, a in enumerate(pmap.phi1):
        for j, b in enumerate(pmap.nu):
            cell = pmap.grid[i][j]
            rows.append((a, b, cell.kind.value, cell.mean_velocity, cell.converged))
    boundary = [(b.phi1, b.nu, b.residual, b.width) for b in pmap.boundary_II0]
    if "csv" in run.formats:
        write_csv(out / "phase_map.csv", ["phi1", "nu", "label", "mean_velocity", "converged"],
                  rows)
        write_csv(out / "boundary.csv", ["phi1", "nu_star", "residual", "width"], boundary)
    if "json" in run.formats:
        meta = pmap.metadata()
        meta["counts"] = {k.value: int((pmap.kinds() == k.value).sum()) for k in PHASE_ORDER}
        meta["boundary_II0"] = [{"phi1": a, "nu_star": b, "residual": c, "width": d}
                                for a, b, c, d in boundary]
        write_json(out / "phase_map.json", meta)
    if "svg" in run.formats:
        (out / "phase_map.svg").write_text(svg.phase_raster(
            pmap.phi1, pmap.nu, pmap.kinds(),
            boundary=[(b.phi1, b.nu) for b in pmap.boundary_II0],
            title=f"phase diagram, phi2 = phi1 + {spec.grip_offset:g}",
            xlabel="phi1 = F1 R^2 / (zeta V1)", ylabel="nu = V2 / V1"), encoding="utf-8")
    if pmap.unconverged:
        _err(f"{len(pmap.unconverged)} cell(s) did not converge; flagged in output")
    return EXIT_OK


def cmd_cut(run: cfgmod.RunConfig, args) -> int:
    p = run.params
    phi1 = cfgmod.parse_number(p.get("phi1", 1.5), "phi1")
    phi2 = cfgmod.parse_number(p.get("phi2", 1.55), "phi2")
    lo, hi, n = cfgmod.parse_range(p.get("nu", [0.5, 1.5, 201]), "nu")
    u0 = cfgmod.parse_number(p.get("u0", 0.0), "u0")
    refine = p.get("refine_II0", True)
    if not isinstance(refine, bool):
        raise cfgmod.ConfigError("refine_II0: expected true or false")
    try:
        DrivePoint(phi1, phi2, lo)
        if n >= 2 and not lo < hi:
            raise ValueError("nu range must be ordered")
    except ValueError as exc:
        raise cfgmod.ConfigError(str(exc)) from None
    nus = [lo + (hi - lo) * k / (n - 1) for k in range(n)] if n > 1 else [lo]
    nus, labels = velocity_cut(phi1, phi2, nus, u0, run.tolerances, args.workers, refine,
                               _progress(args.progress))
    rows = [(nu, lab.mean_velocity, lab.kind.value, lab.converged) for nu, lab in zip(nus, labels)]
    out = run.out_dir
    if "csv" in run.formats:
        write_csv(out / "cut.csv", ["nu", "mean_velocity", "label", "converged"], rows)
    if "json" in run.formats:
        write_json(out / "cut.json", {
            "phi1": phi1, "phi2": phi2, "u0": u0,
            "sequence": [k.value for k in phase_sequence(labels)],
            "points": [{"nu": a, "mean_velocity": b, "label": c, "converged": d}
                       for a, b, c, d in rows]})
    if "svg" in run.formats:
        (out / "cut.svg").write_text(svg.line_chart(
            {"V_P / V1": (list(nus), [lab.mean_velocity for lab in labels]),
             "-nu (locked to rack-2)": (list(nus), [-v for v in nus]),
             "+1 (locked to rack-1)": (list(nus), [1.0] * len(nus))},
            title=f"pinion velocity, phi1={phi1:g}, phi2={phi2:g}",
            xlabel="nu = V2 / V1", ylabel="V_P / V1"), encoding="utf-8")
    return EXIT_OK


def cmd_boundary(run: cfgmod.RunConfig, args) -> int:
    p = run.params
    delta = cfgmod.parse_number(p.get("grip_offset", 0.05), "grip_offset")
    u0 = cfgmod.parse_number(p.get("u0", 0.0), "u0")
    rows_in = p.get("rows")
    if not isinstance(rows_in, list) or not rows_in:
        raise cfgmod.ConfigError("rows: expected a non-empty list of {phi1, bracket}")
    jobs = []
    for k, row in enumerate(rows_in):
        row = cfgmod.check_keys(row, {"phi1", "bracket"}, f"rows[{k}]")
        jobs.append((cfgmod.parse_number(row.get("phi1"), f"rows[{k}].phi1"),
                     cfgmod.parse_pair(row.get("bracket"), f"rows[{k}].bracket")))
    found, warnings = [], 0
    for phi1, bracket in jobs:
        try:
            found.append(find_II0_boundary(phi1, delta, bracket, u0, run.tolerances))
        except (BracketError, ValueError) as exc:
            warnings += 1
            _err(f"skipping phi1={phi1:g}: {exc}")
    rows = [(b.phi1, b.nu, b.residual, b.width) for b in found]
    out = run.out_dir
    if "csv" in run.formats:
        write_csv(out / "boundary.csv", ["phi1", "nu_star", "residual", "width"], rows)
    if "json" in run.formats:
        write_json(out / "boundary.json", {
            "grip_offset": delta, "u0": u0, "warnings": warnings,
            "points": [{"phi1": a, "nu_star": b, "residual": c, "width": d}
                       for a, b, c, d in rows]})
    if warnings:
        _err(f"{warnings} row(s) without a sign change were skipped")
    return EXIT_OK


def cmd_estimate(run: cfgmod.RunConfig, args) -> int:
    device = _device(run.params, args.preset)
    if device is None:
        raise cfgmod.ConfigError("estimate needs a device block or a preset")
    V_R = None
    if "V_R" in run.params:
        try:
            V_R = parse_quantity(run.params["V_R"], VELOCITY)
        except UnitError as exc:
            raise cfgmod.ConfigError(f"V_R: {exc}") from None
        if not V_R > 0:
            raise cfgmod.ConfigError("V_R must be positive")
    report = estimate_report(device, V_R)
    report["device"] = device.as_dict()
    if "json" in run.formats:
        write_json(run.out_dir / "estimate.json", report)
    text = "\n".join([
        f"friction coefficient zeta  {report['zeta']:.4g} kg m^2/s",
        f"moment of inertia I        {report['moment_of_inertia']:.4g} kg m^2",
        f"inertial time tau = I/zeta {report['tau']:.4g} s",
        f"skipping velocity V_S1     {report['V_S1'] * 1e6:.4g} um/s",
        f"skipping velocity V_S2     {report['V_S2'] * 1e6:.4g} um/s",
        f"drive point (phi1, phi2, nu) = ({report['phi1']:.6g}, {report['phi2']:.6g}, "
        f"{report['nu']:.6g})",
        f"clock frequency at V_R={report['V_R'] * 1e6:.4g} um/s: "
        f"{report['clock_frequency']:.4g} Hz",
    ]) + "\n"
    (run.out_dir / "estimate.txt").write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "cut": cmd_cut,
            "boundary": cmd_boundary, "estimate": cmd_estimate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rackpinion",
        description="Frustrated rack-pinion-rack device coupled by the lateral Casimir force.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="YAML run configuration")
        p.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
        p.add_argument("--format", dest="formats",
                       help="comma-separated subset of csv,json,svg")
        p.add_argument("--workers", type=int,
                       help="worker processes (default: config, then $RACKPINION_WORKERS, then 1)")
        p.add_argument("--preset", help="named device preset (simulate, estimate)")
        p.add_argument("--progress", action="store_true", help="report progress on stderr")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = cfgmod.load(args.command, args.config)
        if args.out is not None:
            run.out_dir = args.out
        if args.formats is not None:
            run.formats = cfgmod.parse_formats(args.formats, "--format")
        if args.workers is not None:
            if args.workers < 1:
                raise cfgmod.ConfigError("--workers must be >= 1")
        else:
            try:
                args.workers = run.workers or default_workers()
            except ValueError as exc:
                raise cfgmod.ConfigError(str(exc)) from None
        if args.preset is not None and args.command not in ("simulate", "estimate"):
            raise cfgmod.ConfigError(f"--preset does not apply to {args.command}")
        run.out_dir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](run, args)
    except cfgmod.ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    except IntegrationError as exc:
        _err(f"integration failed: {exc}")
        return EXIT_INTEGRATION
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
