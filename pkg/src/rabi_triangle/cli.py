"""Command-line front end: sweeps, fits, phase diagrams, oracle comparisons.

Configuration is a flat key=value text file with INI-style sections, read by
configparser.  Every run writes a manifest next to the output that echoes the
fully resolved configuration (defaults included), so identical config means
bit-identical output.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .errors import (
    ConfigError,
    DimensionTooLarge,
    DomainError,
    InsufficientPoints,
    RabiTriangleError,
)
from .model import (
    ModelParams,
    PhaseKind,
    boundary_g1c,
    classify_phase,
    critical_theta,
    min_boundary,
    TWO_PI_3,
)
from .observables import inverted_variance
from .scaling import SWEEP_COLUMNS, ExponentFit, SweepRow, SweepTable, fit_exponent, sweep

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FIT = 3
EXIT_ORACLE = 4


def _fmt(value) -> str:
    """17-significant-digit float formatting for regression-diffable CSV."""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict):
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_path: Path, command: str, resolved: dict, extra_outputs=()):
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "command": command,
        "config": resolved,
        "outputs": [str(out_path), *map(str, extra_outputs)],
    }
    with open(str(out_path) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


class _Config:
    """Resolved flat configuration with recorded defaults."""

    def __init__(self, path: str | None):
        self.parser = configparser.ConfigParser()
        if path is not None:
            read = self.parser.read(path)
            if not read:
                raise ConfigError(f"config file not found: {path}")
        self.resolved: dict[str, dict[str, str]] = {}

    def get(self, section: str, key: str, default=None, cast=str):
        try:
            raw = self.parser.get(section, key)
        except (configparser.NoSectionError, configparser.NoOptionError):
            if default is None:
                raise ConfigError(f"missing config key [{section}] {key}")
            raw = default
        raw = str(raw)
        try:
            if cast is bool:
                value = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                value = cast(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
        self.resolved.setdefault(section, {})[key] = str(value)
        return value

    def model_params(self) -> ModelParams:
        omega = self.get("model", "omega", "1.0", float)
        dow = self.get("model", "delta_over_omega", "1e4", float)
        j_hop = self.get("model", "j_hop", "0.1", float)
        theta = self._angle("model", "theta", "-2.0943951023931953")
        g1 = self.get("model", "g1", "0.3", float)
        try:
            return ModelParams(omega, dow * omega, j_hop, theta, g1)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def _angle(self, section, key, default):
        """Angles accept plain floats or expressions like -2pi/3, 0.5*theta_c."""
        raw = self.get(section, key, default, str)
        return parse_angle(raw, self)


def parse_angle(raw: str, cfg: _Config | None = None) -> float:
    raw = raw.strip().lower().replace(" ", "")
    omega = 1.0
    j_hop = 0.1
    if cfg is not None and cfg.parser.has_section("model"):
        omega = float(cfg.parser.get("model", "omega", fallback="1.0"))
        j_hop = float(cfg.parser.get("model", "j_hop", fallback="0.1"))
    names = {
        "pi": math.pi,
        "theta_c": critical_theta(omega, j_hop),
        "2pi/3": TWO_PI_3,
    }
    if raw in names:
        return names[raw]
    if raw.startswith("-") and raw[1:] in names:
        return -names[raw[1:]]
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse angle {raw!r}") from exc


# -- subcommands ----------------------------------------------------------------


def cmd_phase_diagram(cfg: _Config, out: Path, fmt: str, figures: bool) -> int:
    params = cfg.model_params()
    th_lo = cfg._angle("grid", "theta_min", "-pi")
    th_hi = cfg._angle("grid", "theta_max", "pi")
    n_theta = cfg.get("grid", "n_theta", "121", int)
    g_lo = cfg.get("grid", "g1_min", "0.0", float)
    g_hi = cfg.get("grid", "g1_max", "1.0", float)
    n_g1 = cfg.get("grid", "n_g1", "81", int)
    if n_theta < 2 or n_g1 < 2 or th_hi <= th_lo or g_hi <= g_lo:
        raise ConfigError("invalid phase-diagram grid ranges")

    w, j = params.omega, params.j_hop
    th_c = critical_theta(w, j)
    boundary_rows = []
    for i in range(n_theta):
        th = th_lo + (th_hi - th_lo) * i / (n_theta - 1)
        b0 = boundary_g1c(0.0, th, w, j)
        b1 = boundary_g1c(TWO_PI_3, th, w, j)
        g1c, soft = min_boundary(th, w, j)
        boundary_rows.append((th, b0, b1, g1c, soft))

    grid_rows = []
    for i in range(n_theta):
        th = th_lo + (th_hi - th_lo) * i / (n_theta - 1)
        for k in range(n_g1):
            g1 = g_lo + (g_hi - g_lo) * k / (n_g1 - 1)
            try:
                p = ModelParams(w, params.delta, j, th, g1)
                phase = classify_phase(p).kind.value
            except RabiTriangleError:
                phase = "boundary"
            grid_rows.append((th, g1, phase))

    extra = []
    if fmt == "json":
        _write_json(
            out,
            {
                "theta_c": th_c,
                "boundary": [
                    {"theta": r[0], "g1c_q0": r[1], "g1c_pair": r[2], "g1c_min": r[3], "soft_q": r[4]}
                    for r in boundary_rows
                ],
                "grid": [{"theta": r[0], "g1": r[1], "phase": r[2]} for r in grid_rows],
            },
        )
    else:
        _write_csv(out, ("theta", "g1", "phase"), grid_rows)
        bpath = out.with_name(out.stem + "_boundary" + out.suffix)
        _write_csv(bpath, ("theta", "g1c_q0", "g1c_pair", "g1c_min", "soft_q"), boundary_rows)
        extra.append(bpath)
    if figures:
        from .figures import render_phase_diagram

        fig_path = out.with_suffix(".png")
        render_phase_diagram(boundary_rows, grid_rows, fig_path)
        extra.append(fig_path)
    _write_manifest(out, "phase-diagram", cfg.resolved, extra)
    return EXIT_OK


def cmd_sweep(cfg: _Config, out: Path, fmt: str, figures: bool) -> int:
    params = cfg.model_params()
    axis = cfg.get("sweep", "axis", "g1", str)
    start = cfg._angle("sweep", "start", "nan") if axis == "theta" else cfg.get("sweep", "start", "nan", float)
    stop = cfg._angle("sweep", "stop", "nan") if axis == "theta" else cfg.get("sweep", "stop", "nan", float)
    if not (math.isfinite(start) and math.isfinite(stop)) or start == stop:
        raise ConfigError("sweep start/stop must define a nonempty range")
    n_points = cfg.get("sweep", "n_points", "20", int)
    spacing = cfg.get("sweep", "spacing", "log-distance", str)
    branch = cfg.get("sweep", "branch", "auto", str)
    critical_raw = cfg.get("sweep", "critical", "auto", str)
    critical = None if critical_raw == "auto" else parse_angle(critical_raw, cfg)
    measurement = cfg.get("sweep", "measurement", "true", bool)

    try:
        table = sweep(
            params,
            axis=axis,
            x_range=(start, stop),
            n_points=n_points,
            spacing=spacing,
            branch=branch,
            critical=critical,
            include_measurement=measurement,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    extra = []
    if fmt == "json":
        _write_json(
            out,
            {
                "axis": table.axis,
                "critical": table.critical,
                "control": table.control,
                "columns": list(SWEEP_COLUMNS),
                "rows": [list(r.as_tuple()) for r in table.rows],
            },
        )
    else:
        _write_csv(out, SWEEP_COLUMNS, [r.as_tuple() for r in table.rows])
    if figures:
        from .figures import render_sweep

        fig_path = out.with_suffix(".png")
        render_sweep(table.rows, fig_path)
        extra.append(fig_path)
    _write_manifest(out, "sweep", cfg.resolved, extra)
    n_failed = sum(1 for r in table.rows if r.status.startswith("error"))
    if n_failed == len(table.rows):
        print("all sweep rows failed", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def _load_sweep_csv(path: Path) -> SweepTable:
    if not path.exists():
        raise ConfigError(f"input table not found: {path}")
    rows = []
    with open(path) as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            rows.append(
                SweepRow(
                    x=float(rec["x"]),
                    distance=float(rec["distance"]),
                    phase=rec["phase"],
                    qfi=float(rec["I"]),
                    n1=float(rec["N1"]),
                    var_n1=float(rec["var_N1"]),
                    inv_var=float(rec["F"]),
                    ratio=float(rec["ratio"]),
                    eps_soft=float(rec["eps_soft"]),
                    status=rec["status"],
                )
            )
    return SweepTable(axis="file", control={}, critical={}, rows=rows)


def cmd_fit(cfg: _Config, out: Path, fmt: str, figures: bool) -> int:
    input_path = Path(cfg.get("fit", "input", None, str))
    column = cfg.get("fit", "column", "I", str)
    d_min = cfg.get("fit", "window_min", "1e-4", float)
    d_max = cfg.get("fit", "window_max", "1e-2", float)
    table = _load_sweep_csv(input_path)
    fit = fit_exponent(table, column, window=(d_min, d_max))
    payload = {
        "column": column,
        "nu": fit.nu,
        "intercept": fit.intercept,
        "r2": fit.r2,
        "window": list(fit.window),
        "n_points": fit.n_points,
        "poor_fit": fit.poor_fit,
    }
    extra = []
    if fmt == "json":
        _write_json(out, payload)
    else:
        _write_csv(out, tuple(payload), [tuple(payload.values())])
    if figures:
        from .figures import render_fit

        mask = table.ok_mask()
        d = table.column("distance")[mask]
        y = table.column(column)[mask]
        keep = (d >= d_min) & (d <= d_max) & (y > 0)
        fig_path = out.with_suffix(".png")
        render_fit(d[keep], y[keep], fit, column, fig_path)
        extra.append(fig_path)
    _write_manifest(out, "fit", cfg.resolved, extra)
    return EXIT_OK


def cmd_oracle_compare(cfg: _Config, out: Path, fmt: str, figures: bool) -> int:
    from .oracle import oracle_compare

    params = cfg.model_params()
    g1_list = [float(s) for s in cfg.get("oracle", "g1_list", "0.0,0.379", str).split(",")]
    dow_list = [float(s) for s in cfg.get("oracle", "delta_over_omega_list", "10,20,50", str).split(",")]
    n_max = cfg.get("oracle", "n_max", "8", int)
    fd_delta = cfg.get("oracle", "fd_delta", "2e-3", float)

    points = []
    for dow in dow_list:
        for g1 in g1_list:
            points.append(ModelParams(params.omega, dow * params.omega, params.j_hop, params.theta, g1))
    rows = oracle_compare(points, n_max=n_max, fd_delta=fd_delta)

    header = (
        "theta", "g1", "delta_over_omega", "qfi_formula", "qfi_ed", "rel_err_qfi",
        "gap_formula", "gap_ed", "rel_err_gap", "status",
    )
    tuples = [
        (r.theta, r.g1, r.delta_over_omega, r.qfi_formula, r.qfi_ed, r.rel_err_qfi,
         r.gap_formula, r.gap_ed, r.rel_err_gap, r.status)
        for r in rows
    ]
    # trend verdict: per g1 > 0, relative QFI error should fall with delta/omega
    trend_ok = True
    for g1 in g1_list:
        errs = [r.rel_err_qfi for r in rows if r.g1 == g1 and math.isfinite(r.rel_err_qfi) and r.g1 > 0]
        if len(errs) >= 2 and any(b > a * 1.05 for a, b in zip(errs, errs[1:])):
            trend_ok = False
    if fmt == "json":
        _write_json(out, {"columns": list(header), "rows": [list(t) for t in tuples],
                          "error_decreasing_with_delta": trend_ok})
    else:
        _write_csv(out, header, tuples)
    _write_manifest(out, "oracle-compare", cfg.resolved)
    return EXIT_OK


def cmd_measure(cfg: _Config, out: Path, fmt: str, figures: bool) -> int:
    params = cfg.model_params()
    meas = inverted_variance(params)
    payload = {
        "theta": params.theta,
        "g1": params.g1,
        "phase": meas.phase.kind.value,
        "qfi": meas.qfi_value,
        "n1_mean": meas.n1_mean,
        "n1_var": meas.n1_var,
        "inv_variance": meas.inv_variance,
        "qcrb_ratio": meas.qcrb_ratio,
        "extras": {k: v for k, v in meas.extras.items()},
    }
    if fmt == "json":
        _write_json(out, payload)
    else:
        flat = {k: v for k, v in payload.items() if k != "extras"}
        _write_csv(out, tuple(flat), [tuple(flat.values())])
    _write_manifest(out, "measure", cfg.resolved)
    return EXIT_OK


_COMMANDS = {
    "phase-diagram": cmd_phase_diagram,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "oracle-compare": cmd_oracle_compare,
    "measure": cmd_measure,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rabi-triangle",
        description="Phase diagram, metrology and scaling analysis of a three-cavity Rabi ring.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None, help="flat key=value config file")
    parser.add_argument("--out", required=True, help="output path")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        cfg = _Config(args.config)
        fmt = args.format or cfg.get("output", "format", "csv", str)
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown output format {fmt!r}")
        figures = cfg.get("output", "figures", "false", bool)
        cfg.resolved.setdefault("run", {})
        cfg.resolved["run"]["threads"] = str(args.threads)
        cfg.resolved["run"]["seed"] = str(args.seed if args.seed is not None else 0)
        cfg.resolved["run"]["format"] = fmt
        out = Path(args.out)
        if out.parent and not out.parent.exists():
            out.parent.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out, fmt, figures)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientPoints as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return EXIT_FIT
    except DimensionTooLarge as exc:
        print(f"oracle infeasible: {exc}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":
    raise SystemExit(main())
