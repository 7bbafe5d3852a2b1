"""Figure rendering for profiles, certificates, and solved fields.

Everything draws through the Agg backend and writes straight to disk;
nothing opens a window.  Repeated runs of the same computation must
produce identical bytes, so the writers strip volatile metadata (dates,
tool version strings) and pin the SVG id hash salt.  Supported formats:
``.png``, ``.svg``, ``.pdf``.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "singlap"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .errors import ConfigError
from .halfplane import Field2D, symmetry_deviation

__all__ = [
    "save_certificate_plot",
    "save_field_plot",
    "save_profile_plot",
    "save_symmetry_plot",
]

_METADATA = {
    ".png": {"Software": None},
    ".svg": {"Date": None},
    ".pdf": {"CreationDate": None},
}

_PASS_COLOR = "#2c7a3f"
_FAIL_COLOR = "#b03030"


def _finish(fig, path) -> str:
    path = str(path)
    dot = path.rfind(".")
    suffix = path[dot:].lower() if dot >= 0 else ""
    meta = _METADATA.get(suffix)
    if meta is None:
        plt.close(fig)
        raise ConfigError(
            f"unsupported figure format {suffix!r}; use one of {sorted(_METADATA)}"
        )
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path


def save_profile_plot(profile, path, logscale: bool = False) -> str:
    """Draw a profile and its derivative, with the power curve for scale.

    Two stacked panels: values on top (the pure power curve dashed
    underneath, unless the profile *is* the power solution), derivative
    samples below with the limit slope marked when the profile carries
    one.  ``logscale`` switches the value panel to log-log, which turns
    the power curve into a straight line; samples at ``t <= 0`` are
    dropped there.
    """
    t = np.asarray(profile.grid, dtype=float)
    par = profile.par
    fig, (ax_v, ax_d) = plt.subplots(
        2, 1, sharex=not logscale, figsize=(6.4, 6.4), constrained_layout=True
    )

    if logscale:
        keep = t > 0.0
        tv = t[keep]
        ax_v.loglog(tv, profile.values[keep], color="#1f4f8f", label="profile")
        if profile.kind != "power":
            ax_v.loglog(
                tv,
                par.amplitude * tv**par.exponent,
                "--",
                color="#888888",
                label="power solution",
            )
    else:
        ax_v.plot(t, profile.values, color="#1f4f8f", label="profile")
        if profile.kind != "power":
            tv = np.where(t >= 0.0, t, 0.0)
            ax_v.plot(
                t,
                par.amplitude * tv**par.exponent,
                "--",
                color="#888888",
                label="power solution",
            )
    ax_v.set_ylabel("v")
    ax_v.legend(loc="best")
    ax_v.set_title(f"gamma={par.gamma:g} {profile.kind} profile")

    finite = np.isfinite(profile.derivs)
    ax_d.plot(t[finite], profile.derivs[finite], color="#1f4f8f")
    if profile.limit_slope is not None:
        ax_d.axhline(
            profile.limit_slope,
            linestyle=":",
            color="#888888",
            label=f"limit slope {profile.limit_slope:g}",
        )
        ax_d.legend(loc="best")
    ax_d.set_xlabel("t")
    ax_d.set_ylabel("v'")
    return _finish(fig, path)


def save_certificate_plot(certificates, path) -> str:
    """Horizontal bar chart of certificate margins, colored by outcome.

    One bar per certificate at its signed margin (pass is exactly
    margin >= 0), annotated with the empirical constant; the zero line is
    drawn for reference.
    """
    certs = list(certificates)
    if not certs:
        raise ConfigError("no certificates to plot")
    labels = [f"{c.kind}\n[{c.region}]" for c in certs]
    margins = [c.margin for c in certs]
    colors = [_PASS_COLOR if c.passed else _FAIL_COLOR for c in certs]
    fig, ax = plt.subplots(
        figsize=(6.4, 1.0 + 0.7 * len(certs)), constrained_layout=True
    )
    ypos = np.arange(len(certs))[::-1]
    ax.barh(ypos, margins, color=colors, height=0.6)
    for y, c in zip(ypos, certs):
        ax.annotate(
            f" C*={c.empirical_constant:.6g}",
            xy=(c.margin, y),
            va="center",
            ha="left" if c.margin >= 0 else "right",
            fontsize=8,
        )
    ax.axvline(0.0, color="#333333", linewidth=0.8)
    ax.set_yticks(ypos, labels, fontsize=8)
    ax.set_xlabel("signed margin (pass iff >= 0)")
    ax.set_title(f"{sum(c.passed for c in certs)}/{len(certs)} certificates pass")
    return _finish(fig, path)


def save_field_plot(field: Field2D, path) -> str:
    """Heat map of a solved field over its rectangle."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2), constrained_layout=True)
    mesh = ax.pcolormesh(
        field.grid.xs, field.grid.zs, field.values.T, shading="auto", cmap="viridis"
    )
    fig.colorbar(mesh, ax=ax, label="u")
    ax.set_xlabel("x'")
    ax.set_ylabel("z")
    ax.set_title(
        f"gamma={field.par.gamma:g}, {field.boundary_mode} data, h={field.grid.h:g}"
    )
    return _finish(fig, path)


def save_symmetry_plot(field: Field2D, path) -> str:
    """Per-height-row relative deviation from row constancy, log scale.

    Rows whose deviation is exactly zero (the prescribed top and bottom)
    are dropped from the log plot; if every row is zero the curve is
    drawn on a linear axis instead.
    """
    per_row, max_dev = symmetry_deviation(field)
    zs = field.grid.zs
    fig, ax = plt.subplots(figsize=(6.4, 4.0), constrained_layout=True)
    positive = per_row > 0.0
    if np.any(positive):
        ax.semilogy(zs[positive], per_row[positive], color="#1f4f8f", marker=".")
    else:
        ax.plot(zs, per_row, color="#1f4f8f", marker=".")
    ax.set_xlabel("height z")
    ax.set_ylabel("relative row deviation (central columns)")
    ax.set_title(f"max deviation {max_dev:.3e}")
    return _finish(fig, path)
