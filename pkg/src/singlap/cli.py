"""Batch front end: one subcommand per workflow, files out, exit codes in.

Subcommands
-----------
exact      sample the closed-form power solution to CSV
shoot      construct the linear-growth solution with a prescribed slope
scale      cross-check the scaling law between two prescribed slopes
verify     run the five bound certificates on a stored profile or field
halfplane  solve the 2-D finite-difference problem on a rectangle
report     full pipeline (shoot + verify + halfplane) with figures

Every subcommand accepts ``--config file.json`` holding the same keys as
its flags (dashes become underscores); explicitly given flags override
the file.  Exit codes: 0 success, 1 numerical failure, 2 configuration
or parse error -- exhaustively.  All floating output is written at 15
significant digits, so identical configurations produce byte-identical
CSV/JSON; figures omit timestamps for the same reason.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .certificates import run_standard_checks
from .errors import ConfigError, FormatError, NumericsError
from .halfplane import (
    Field2D,
    SolveSpec2D,
    boundary_from_power,
    boundary_from_profile,
    build_grid,
    load_field,
    save_field,
    solve,
    symmetry_deviation,
)
from .ioutil import read_json, write_csv, write_json
from .profiles import (
    Profile1D,
    StripSpec,
    eval_power,
    gamma_param,
    load_profile,
    rescale,
    save_profile,
)
from .shooting import ShootSpec, solve_prescribed_slope

__all__ = ["main"]

_SYMMETRY_HEADER = "z,deviation"


# ---------------------------------------------------------------------------
# option tables: one source of truth for flags, config keys, and defaults
# ---------------------------------------------------------------------------

class _Opt:
    def __init__(self, flag: str, kind: str, default, help: str, choices=None):
        self.flag = flag
        self.key = flag.lstrip("-").replace("-", "_")
        self.kind = kind  # float | int | str | bool
        self.default = default
        self.help = help
        self.choices = choices


def _common(plot_flag: bool) -> list[_Opt]:
    opts = [
        _Opt("--out", "str", ".", "output directory (created if missing)"),
        _Opt("--config", "str", None, "JSON file with defaults for this subcommand"),
        _Opt(
            "--figure-format",
            "str",
            "svg",
            "figure file format",
            choices=("svg", "png"),
        ),
    ]
    if plot_flag:
        opts.append(_Opt("--plot", "bool", False, "also render figures"))
    return opts


_TABLES: dict[str, list[_Opt]] = {
    "exact": [
        _Opt("--gamma", "float", None, "singularity exponent, must be > 1"),
        _Opt("--t-max", "float", 10.0, "last abscissa of the sample grid"),
        _Opt("--n", "int", 1000, "number of equal steps (n+1 rows)"),
        *_common(plot_flag=True),
    ],
    "shoot": [
        _Opt("--gamma", "float", None, "singularity exponent, must be > 1"),
        _Opt("--slope", "float", None, "prescribed far-field slope, must be > 0"),
        _Opt("--tol", "float", 1e-6, "relative tolerance of the shooting pipeline"),
        _Opt("--t-max", "float", 1e4, "far-field horizon"),
        *_common(plot_flag=True),
    ],
    "scale": [
        _Opt("--gamma", "float", None, "singularity exponent, must be > 1"),
        _Opt("--slope-from", "float", 1.0, "slope of the base solve"),
        _Opt("--slope-to", "float", None, "slope the base solve is rescaled to"),
        _Opt("--tol", "float", 1e-5, "sup-relative mismatch budget"),
        _Opt("--t-max", "float", 1e4, "far-field horizon"),
        *_common(plot_flag=True),
    ],
    "verify": [
        _Opt("--in", "str", None, "stored profile or field (.csv or .json)"),
        _Opt("--strip", "float", 1.0, "boundary strip height for the power scans"),
        _Opt(
            "--far",
            "float",
            None,
            "far-field threshold (default: max abscissa / 10 for profiles)",
        ),
        *_common(plot_flag=True),
    ],
    "halfplane": [
        _Opt("--gamma", "float", None, "singularity exponent, must be > 1"),
        _Opt("--width", "float", 8.0, "rectangle width (x' direction)"),
        _Opt("--height", "float", 4.0, "rectangle height (z direction)"),
        _Opt("--h", "float", 0.0625, "grid spacing, must divide width and height"),
        _Opt("--perturb", "float", 0.0, "lateral data warp amplitude, |a| < 1"),
        _Opt("--slope", "float", 1.0, "boundary profile slope; 0 uses the power solution"),
        _Opt("--relax", "float", None, "fixed relaxation factor (default: ramped)"),
        *_common(plot_flag=True),
    ],
    "report": [
        _Opt("--gamma", "float", None, "singularity exponent, must be > 1"),
        _Opt("--slope", "float", 1.0, "prescribed far-field slope"),
        _Opt("--tol", "float", 1e-6, "relative tolerance of the shooting pipeline"),
        _Opt("--strip", "float", 1.0, "boundary strip height for the certificates"),
        _Opt("--width", "float", 8.0, "rectangle width for the 2-D solve"),
        _Opt("--height", "float", 4.0, "rectangle height for the 2-D solve"),
        _Opt("--h", "float", 0.0625, "grid spacing for the 2-D solve"),
        _Opt("--perturb", "float", 0.0, "lateral data warp amplitude"),
        *_common(plot_flag=False),
    ],
}

_REQUIRED: dict[str, tuple[str, ...]] = {
    "exact": ("gamma",),
    "shoot": ("gamma", "slope"),
    "scale": ("gamma", "slope_to"),
    "verify": ("in",),
    "halfplane": ("gamma",),
    "report": ("gamma",),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="singlap",
        description="Profiles, certificates, and 2-D solves for the "
        "singular half-space problem -Delta u = u^(-gamma).",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name, table in _TABLES.items():
        sp = subs.add_parser(name, help=f"run the {name} workflow")
        for opt in table:
            kwargs: dict = {"default": argparse.SUPPRESS, "help": opt.help}
            if opt.kind == "bool":
                kwargs["action"] = "store_true"
            else:
                kwargs["type"] = {"float": float, "int": int, "str": str}[opt.kind]
                if opt.choices:
                    kwargs["choices"] = opt.choices
            sp.add_argument(opt.flag, dest=opt.key, **kwargs)
    return parser


def _coerce(opt: _Opt, value):
    label = f"config key {opt.key!r}"
    if opt.kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{label} must be true or false, got {value!r}")
        return value
    if opt.kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{label} must be an integer, got {value!r}")
        return value
    if opt.kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{label} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{label} must be a string, got {value!r}")
    if opt.choices and value not in opt.choices:
        raise ConfigError(f"{label} must be one of {opt.choices}, got {value!r}")
    return value


def _merge_config(ns: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags, with validation."""
    sub = ns.subcommand
    table = {opt.key: opt for opt in _TABLES[sub]}
    merged = {key: opt.default for key, opt in table.items()}
    given = {k: v for k, v in vars(ns).items() if k != "subcommand"}

    config_path = given.get("config")
    if config_path is not None:
        raw = read_json(Path(config_path))
        if not isinstance(raw, dict):
            raise ConfigError(f"{config_path} must hold a JSON object")
        for key, value in raw.items():
            if key == "config" or key not in table:
                raise ConfigError(
                    f"unknown config key {key!r} for subcommand {sub!r}"
                )
            merged[key] = _coerce(table[key], value)

    merged.update(given)
    for key in _REQUIRED[sub]:
        if merged.get(key) is None:
            raise ConfigError(f"--{key.replace('_', '-')} is required for {sub!r}")
    merged["subcommand"] = sub
    return merged


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _outdir(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _say_wrote(*paths) -> None:
    for p in paths:
        print(f"wrote {p}")


def _power_profile(par, t_max: float, n: int) -> Profile1D:
    if not (math.isfinite(t_max) and t_max > 0.0):
        raise ConfigError(f"--t-max must be > 0, got {t_max!r}")
    if n < 1:
        raise ConfigError(f"--n must be >= 1, got {n!r}")
    ts = np.linspace(0.0, t_max, n + 1)
    v, dv = eval_power(par, ts)
    return Profile1D(
        grid=ts,
        values=v,
        derivs=dv,
        par=par,
        kind="power",
        evaluator=lambda t: eval_power(par, t),
    )


def _load_any(path_str: str):
    p = Path(path_str)
    if not p.exists():
        raise ConfigError(f"input {p} does not exist")
    if p.suffix == ".json":
        tag = read_json(p).get("format")
    elif p.suffix == ".csv":
        sidecar = p.with_suffix(".json")
        if not sidecar.exists():
            raise ConfigError(f"no envelope next to {p}")
        tag = read_json(sidecar).get("format")
    else:
        raise ConfigError(f"input must end in .csv or .json, got {p.name!r}")
    if tag == "singlap.profile.v1":
        return load_profile(p.with_suffix(".csv"))
    if tag == "singlap.field.v1":
        return load_field(p)
    raise FormatError(f"unknown format tag {tag!r} next to {p}")


def _far_spec(obj, strip_height: float, far_value) -> StripSpec:
    if far_value is not None:
        return StripSpec(height=float(far_value))
    if isinstance(obj, Field2D):
        return StripSpec(height=strip_height)
    return StripSpec(height=max(strip_height, float(obj.grid[-1]) / 10.0))


def _fig_path(out: Path, stem: str, cfg) -> Path:
    return out / f"{stem}.{cfg['figure_format']}"


def _print_certs(certs) -> int:
    npass = 0
    for c in certs:
        status = "PASS" if c.passed else "FAIL"
        npass += c.passed
        print(
            f"{c.kind:<16} [{c.region}] {status}  "
            f"C*={c.empirical_constant:.15g}  margin={c.margin:.3e}"
        )
    print(f"{npass}/{len(certs)} certificates pass")
    return npass


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_exact(cfg) -> int:
    par = gamma_param(cfg["gamma"])
    out = _outdir(cfg)
    prof = _power_profile(par, cfg["t_max"], cfg["n"])
    csv_path, json_path = save_profile(prof, out / "power_profile")
    _say_wrote(csv_path, json_path)
    if cfg["plot"]:
        from . import plots

        _say_wrote(plots.save_profile_plot(prof, _fig_path(out, "power_profile", cfg)))
    print(f"rows = {prof.grid.size}")
    return 0


def _cmd_shoot(cfg) -> int:
    par = gamma_param(cfg["gamma"])
    out = _outdir(cfg)
    spec = ShootSpec(horizon=cfg["t_max"], rel_tol=cfg["tol"])
    prof, rep = solve_prescribed_slope(par, cfg["slope"], spec)
    csv_path, json_path = save_profile(prof, out / "profile")
    rep_path = write_json(out / "shoot_report.json", rep.to_dict())
    _say_wrote(csv_path, json_path, rep_path)
    if cfg["plot"]:
        from . import plots

        _say_wrote(plots.save_profile_plot(prof, _fig_path(out, "profile", cfg)))
    print(f"limit_slope = {rep.route_a_slope:.15g}")
    print(f"discrepancy_sup_rel = {rep.discrepancy_sup_rel:.15g}")
    return 0


def _cmd_scale(cfg) -> int:
    par = gamma_param(cfg["gamma"])
    out = _outdir(cfg)
    slope_from = cfg["slope_from"]
    slope_to = cfg["slope_to"]
    if not (math.isfinite(slope_from) and slope_from > 0.0):
        raise ConfigError(f"--slope-from must be > 0, got {slope_from!r}")
    if not (math.isfinite(slope_to) and slope_to > 0.0):
        raise ConfigError(f"--slope-to must be > 0, got {slope_to!r}")
    spec = ShootSpec(horizon=cfg["t_max"])
    base, _ = solve_prescribed_slope(par, slope_from, spec)
    direct, _ = solve_prescribed_slope(par, slope_to, spec)
    lam = (slope_to / slope_from) ** ((par.gamma + 1.0) / (par.gamma - 1.0))
    scaled = rescale(base, lam)

    t_hi = min(float(scaled.grid[-1]), float(direct.grid[-1]))
    ts = direct.grid[(direct.grid > 0.0) & (direct.grid <= t_hi)]
    v_s, _d = scaled.eval(ts)
    v_d, _d = direct.eval(ts)
    mismatch = float(np.max(np.abs(v_s - v_d) / v_d))
    passed = mismatch <= cfg["tol"]

    s_csv, s_json = save_profile(scaled, out / "scaled_profile")
    d_csv, d_json = save_profile(direct, out / "direct_profile")
    rep_path = write_json(
        out / "scale_report.json",
        {
            "gamma": par.gamma,
            "slope_from": slope_from,
            "slope_to": slope_to,
            "lambda": lam,
            "sup_rel_mismatch": mismatch,
            "tolerance": cfg["tol"],
            "passed": passed,
        },
    )
    _say_wrote(s_csv, s_json, d_csv, d_json, rep_path)
    if cfg["plot"]:
        from . import plots

        _say_wrote(plots.save_profile_plot(scaled, _fig_path(out, "scaled_profile", cfg)))
    print(f"lambda = {lam:.15g}")
    print(f"sup_rel_mismatch = {mismatch:.15g}")
    if not passed:
        print(f"mismatch exceeds tolerance {cfg['tol']:.15g}", file=sys.stderr)
        return 1
    return 0


def _cmd_verify(cfg) -> int:
    out = _outdir(cfg)
    obj = _load_any(cfg["in"])
    strip = StripSpec(height=cfg["strip"])
    far = _far_spec(obj, cfg["strip"], cfg["far"])
    certs = run_standard_checks(obj, strip, far=far)
    cert_path = write_json(out / "certificates.json", [c.to_dict() for c in certs])
    _say_wrote(cert_path)
    if cfg["plot"]:
        from . import plots

        _say_wrote(plots.save_certificate_plot(certs, _fig_path(out, "certificates", cfg)))
    npass = _print_certs(certs)
    return 0 if npass == len(certs) else 1


def _solve_halfplane(cfg):
    par = gamma_param(cfg["gamma"])
    grid = build_grid(cfg["width"], cfg["height"], cfg["h"])
    slope = cfg["slope"]
    if slope == 0.0:
        bnd = boundary_from_power(par, grid, perturb=cfg["perturb"])
    elif math.isfinite(slope) and slope > 0.0:
        prof, _ = solve_prescribed_slope(par, slope)
        bnd = boundary_from_profile(prof, grid, perturb=cfg["perturb"])
    else:
        raise ConfigError(f"--slope must be >= 0, got {slope!r}")
    spec = SolveSpec2D(relax=cfg.get("relax"))
    field, rep = solve(par, grid, bnd, spec)
    per_row, max_dev = symmetry_deviation(field)
    report = {
        "gamma": par.gamma,
        "width": grid.width,
        "height": grid.height,
        "h": grid.h,
        "perturb": cfg["perturb"],
        "slope": slope,
        "max_dev": max_dev,
        **rep.to_dict(),
    }
    return field, rep, per_row, max_dev, report


def _write_halfplane(out: Path, field, per_row, report) -> list[Path]:
    csv_path, json_path = save_field(field, out / "field")
    rep_path = write_json(out / "halfplane_report.json", report)
    sym_path = write_csv(
        out / "symmetry.csv", _SYMMETRY_HEADER, zip(field.grid.zs, per_row)
    )
    return [csv_path, json_path, rep_path, sym_path]


def _cmd_halfplane(cfg) -> int:
    out = _outdir(cfg)
    field, rep, per_row, max_dev, report = _solve_halfplane(cfg)
    _say_wrote(*_write_halfplane(out, field, per_row, report))
    if cfg["plot"]:
        from . import plots

        _say_wrote(
            plots.save_field_plot(field, _fig_path(out, "field", cfg)),
            plots.save_symmetry_plot(field, _fig_path(out, "symmetry", cfg)),
        )
    print(f"iterations = {rep.iterations}")
    print(f"max_dev = {max_dev:.15g}")
    return 0


def _cmd_report(cfg) -> int:
    par = gamma_param(cfg["gamma"])
    out = _outdir(cfg)
    from . import plots

    spec = ShootSpec(rel_tol=cfg["tol"])
    prof, rep = solve_prescribed_slope(par, cfg["slope"], spec)
    written = list(save_profile(prof, out / "profile"))
    written.append(write_json(out / "shoot_report.json", rep.to_dict()))
    figures = [plots.save_profile_plot(prof, _fig_path(out, "profile", cfg))]

    strip = StripSpec(height=cfg["strip"])
    certs = run_standard_checks(prof, strip, far=_far_spec(prof, cfg["strip"], None))
    written.append(write_json(out / "certificates.json", [c.to_dict() for c in certs]))
    figures.append(plots.save_certificate_plot(certs, _fig_path(out, "certificates", cfg)))

    field, _frep, per_row, max_dev, hp_report = _solve_halfplane(
        {**cfg, "relax": None}
    )
    written.extend(_write_halfplane(out, field, per_row, hp_report))
    figures.append(plots.save_field_plot(field, _fig_path(out, "field", cfg)))
    figures.append(plots.save_symmetry_plot(field, _fig_path(out, "symmetry", cfg)))

    npass = sum(c.passed for c in certs)
    summary = {
        "gamma": par.gamma,
        "slope": cfg["slope"],
        "discrepancy_sup_rel": rep.discrepancy_sup_rel,
        "certificates_passed": int(npass),
        "certificates_total": len(certs),
        "max_dev": max_dev,
        "files": sorted(p.name for p in written),
        "figures": sorted(Path(f).name for f in figures),
    }
    written.append(write_json(out / "summary.json", summary))
    _say_wrote(*written, *figures)
    _print_certs(certs)
    print(f"discrepancy_sup_rel = {rep.discrepancy_sup_rel:.15g}")
    print(f"max_dev = {max_dev:.15g}")
    return 0 if npass == len(certs) else 1


_DISPATCH: dict[str, Callable[[dict], int]] = {
    "exact": _cmd_exact,
    "shoot": _cmd_shoot,
    "scale": _cmd_scale,
    "verify": _cmd_verify,
    "halfplane": _cmd_halfplane,
    "report": _cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        cfg = _merge_config(ns)
        return _DISPATCH[cfg["subcommand"]](cfg)
    except SystemExit as exc:  # argparse: 2 on bad flags, 0 on --help
        code = exc.code
        return 0 if code is None else int(code)
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
