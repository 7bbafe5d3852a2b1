"""Exact reference objects for the boundary-singular reaction ``-v'' = v^(-gamma)``.

For every ``gamma > 1`` the one-dimensional problem on the half-line with
``v(0) = 0`` has an explicit power-law solution

    ``v(t) = A * t^a``  with  ``a = 2/(gamma+1)``,

whose amplitude ``A`` is pinned by ``A^(gamma+1) * (2*gamma - 2) == (gamma+1)^2``.
This module holds that closed-form material: the derived constants, the
power solution and the supersolution built on it, multiplicative barriers,
the scaling group of the equation, the conserved first integral, and the
``Profile1D`` container (with CSV/JSON serialization) that the numerical
modules produce and consume.  Nothing here integrates an ODE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigError, FormatError
from .ioutil import fmt, read_csv, read_json, write_csv, write_json

__all__ = [
    "GammaParam",
    "gamma_param",
    "power_amplitude",
    "eval_power",
    "eval_supersolution",
    "BarrierSpec",
    "eval_barrier",
    "StripSpec",
    "ScalingMap",
    "Profile1D",
    "rescale",
    "first_integral",
    "save_profile",
    "load_profile",
    "profile_csv_path",
]

PROFILE_KINDS = ("power", "linear_growth", "raw")

_PROFILE_HEADER = "t,v,dv"


def power_amplitude(gamma: float) -> float:
    """Amplitude of the flat-boundary power solution.

    Closed form ``((gamma+1)^2 / (2*gamma-2))^(1/(gamma+1))`` followed by a
    single Newton step on ``A^(gamma+1)*(2*gamma-2) - (gamma+1)^2 = 0`` to
    pin the defining identity at the last-ulp level.
    """
    g = float(gamma)
    if not math.isfinite(g) or g <= 1.0:
        raise ConfigError(f"gamma must be a finite number > 1, got {gamma!r}")
    p = g + 1.0
    r = 2.0 * g - 2.0
    amp = (p * p / r) ** (1.0 / p)
    f = amp**p * r - p * p
    df = p * amp ** (p - 1.0) * r
    return amp - f / df


@dataclass(frozen=True)
class GammaParam:
    """Derived constants for one admissible singularity strength.

    Attributes
    ----------
    gamma:
        Singularity strength, ``> 1``.
    exponent:
        Boundary growth power of the vanishing solutions, ``2/(gamma+1)``.
    grad_exponent:
        Power at which the gradient blows up at the boundary,
        ``(1-gamma)/(gamma+1)`` (negative).
    amplitude:
        Coefficient of the power solution ``amplitude * t**exponent``.
    """

    gamma: float
    exponent: float
    grad_exponent: float
    amplitude: float

    @property
    def slope_exponent(self) -> float:
        """How the limit slope transforms under rescaling: ``(gamma-1)/(gamma+1)``."""
        return -self.grad_exponent


def gamma_param(gamma: float) -> GammaParam:
    """Validate ``gamma`` and bundle its derived constants."""
    g = float(gamma)
    amp = power_amplitude(g)  # re-raises for bad gamma
    par = GammaParam(
        gamma=g,
        exponent=2.0 / (g + 1.0),
        grad_exponent=(1.0 - g) / (g + 1.0),
        amplitude=amp,
    )
    ident = amp ** (g + 1.0) * (2.0 * g - 2.0) / (g + 1.0) ** 2
    if abs(ident - 1.0) > 1e-12:
        raise ConfigError(f"amplitude identity violated for gamma={g!r}: {ident!r}")
    return par


def _as_float_array(t, name: str = "t") -> tuple[np.ndarray, bool]:
    tt = np.asarray(t, dtype=float)
    return tt, tt.ndim == 0


def eval_power(par: GammaParam, t):
    """Value and derivative of the power solution; vectorized over ``t >= 0``.

    The derivative at ``t == 0`` is reported as ``+inf`` (the profile leaves
    the boundary with infinite slope for every ``gamma > 1``).
    """
    tt, scalar = _as_float_array(t)
    if np.any(tt < 0.0):
        raise ConfigError("power solution is only defined for t >= 0")
    v = par.amplitude * tt**par.exponent
    dv = np.full_like(v, np.inf)
    pos = tt > 0.0
    dv[pos] = par.amplitude * par.exponent * tt[pos] ** (par.exponent - 1.0)
    if scalar:
        return float(v), float(dv)
    return v, dv


def eval_supersolution(par: GammaParam, t):
    """The explicit strict supersolution ``A*(t + t^a)`` and its derivative.

    Its curvature comes entirely from the power part, so
    ``-w'' = (A t^a)^(-gamma) > w^(-gamma)``: it lies strictly above the power
    solution and dominates every vanishing solution near the boundary.
    """
    tt, scalar = _as_float_array(t)
    if np.any(tt < 0.0):
        raise ConfigError("supersolution is only defined for t >= 0")
    a = par.exponent
    w = par.amplitude * (tt + tt**a)
    dw = np.full_like(w, np.inf)
    pos = tt > 0.0
    dw[pos] = par.amplitude * (1.0 + a * tt[pos] ** (a - 1.0))
    if scalar:
        return float(w), float(dw)
    return w, dw


@dataclass(frozen=True)
class BarrierSpec:
    """A translated multiple of the power solution, ``beta * P(x + eps)``.

    ``beta >= 1`` makes it a supersolution (the residual picks up the
    positive factor ``beta - beta^(-gamma)``), and ``eps >= 0`` slides it
    toward the boundary without breaking that sign.
    """

    beta: float = 1.0
    eps: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 1.0):
            raise ConfigError(f"barrier multiplier must be >= 1, got {self.beta!r}")
        if not (math.isfinite(self.eps) and self.eps >= 0.0):
            raise ConfigError(f"barrier shift must be >= 0, got {self.eps!r}")


def eval_barrier(par: GammaParam, spec: BarrierSpec, x):
    """Value and derivative of the barrier ``beta * P(x + eps)``."""
    xx, scalar = _as_float_array(x, "x")
    if np.any(xx < 0.0):
        raise ConfigError("barrier is only defined for x >= 0")
    v, dv = eval_power(par, xx + spec.eps)
    if scalar:
        return float(spec.beta * v), float(spec.beta * dv)
    return spec.beta * v, spec.beta * dv


@dataclass(frozen=True)
class StripSpec:
    """A boundary strip ``0 < x <= height`` with an optional ceiling value."""

    height: float
    theta: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.height) and self.height > 0.0):
            raise ConfigError(f"strip height must be > 0, got {self.height!r}")
        if self.theta is not None and not (math.isfinite(self.theta) and self.theta > 0.0):
            raise ConfigError(f"strip ceiling must be > 0, got {self.theta!r}")


@dataclass(frozen=True)
class ScalingMap:
    """One element of the scaling group ``v(t) -> lam^(-a) v(lam t)``.

    ``exponent`` is the growth power ``a`` of the family being rescaled; it
    is fixed by the ``GammaParam`` and must match for composition.
    """

    lam: float
    exponent: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise ConfigError(f"scaling factor must be > 0, got {self.lam!r}")

    def compose(self, other: "ScalingMap") -> "ScalingMap":
        if self.exponent != other.exponent:
            raise ConfigError("cannot compose scaling maps of different exponent")
        return ScalingMap(self.lam * other.lam, self.exponent)

    def __call__(self, profile: "Profile1D") -> "Profile1D":
        return rescale(profile, self.lam)


def scaling_map(par: GammaParam, lam: float) -> ScalingMap:
    return ScalingMap(lam=lam, exponent=par.exponent)


_DV_TIE_TOL = 8.0 * np.finfo(float).eps


@dataclass(frozen=True)
class Profile1D:
    """A sampled one-dimensional profile with derivative data.

    ``grid`` is strictly increasing; ``values`` are positive away from
    ``t == 0`` and exactly zero there.  ``kind`` tags what the profile is
    known to be: the power solution, a linear-growth solution (with its
    ``limit_slope``), or raw integrator output.  Solution kinds live on
    ``t >= 0``; raw windows may reach negative abscissae (a trajectory
    whose zero lies left of the origin).

    Solution kinds carry concave data, so their derivative samples must
    not increase (ties at rounding level are tolerated).

    ``evaluator``, when present, maps an array of abscissae to
    ``(values, derivs)`` between ``grid[0]`` and ``grid[-1]``; profiles
    loaded from disk fall back to monotone linear interpolation.
    """

    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    par: GammaParam
    kind: str = "raw"
    limit_slope: float | None = None
    evaluator: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=float)
        derivs = np.array(self.derivs, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ConfigError("profile grid must be 1-D with at least 2 points")
        if values.shape != grid.shape or derivs.shape != grid.shape:
            raise ConfigError("profile arrays must share the grid's shape")
        if not (np.all(np.isfinite(grid)) and np.all(np.diff(grid) > 0.0)):
            raise ConfigError("profile grid must be finite and strictly increasing")
        if np.any(~np.isfinite(values)):
            raise ConfigError("profile values must be finite")
        if self.kind not in PROFILE_KINDS:
            raise ConfigError(f"unknown profile kind {self.kind!r}")
        if self.kind == "raw":
            # raw trajectories stop strictly above zero, but their window may
            # reach negative abscissae when the zero sits left of the origin
            if np.any(values <= 0.0):
                raise ConfigError("raw trajectory samples must be positive")
        else:
            if grid[0] < 0.0:
                raise ConfigError("solution profiles live on t >= 0")
            if grid[0] == 0.0 and values[0] != 0.0:
                raise ConfigError("a profile containing t=0 must vanish there")
            if np.any(values[grid > 0.0] <= 0.0):
                raise ConfigError("profile values must be positive for t > 0")
            dv = derivs[np.isfinite(derivs)]
            tie = _DV_TIE_TOL * np.maximum(np.abs(dv[:-1]), 1e-300)
            if not np.all(np.diff(dv) < tie):
                raise ConfigError("solution profiles must have decreasing derivatives")
        if self.limit_slope is not None and not (
            math.isfinite(self.limit_slope) and self.limit_slope >= 0.0
        ):
            raise ConfigError(f"limit slope must be >= 0, got {self.limit_slope!r}")
        for name, arr in (("grid", grid), ("values", values), ("derivs", derivs)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def t_max(self) -> float:
        return float(self.grid[-1])

    def eval(self, t):
        """Evaluate ``(v, dv)`` inside the covered interval."""
        tt, scalar = _as_float_array(t)
        if np.any(tt < self.grid[0]) or np.any(tt > self.grid[-1] * (1.0 + 1e-12)):
            raise ConfigError("evaluation outside the profile's interval")
        if self.evaluator is not None:
            v, dv = self.evaluator(np.atleast_1d(tt))
        else:
            v = np.interp(np.atleast_1d(tt), self.grid, self.values)
            dv = np.interp(np.atleast_1d(tt), self.grid, self.derivs)
        if scalar:
            return float(v[0]), float(dv[0])
        return v, dv

    def with_kind(self, kind: str, limit_slope: float | None = None) -> "Profile1D":
        return replace(self, kind=kind, limit_slope=limit_slope)


def rescale(profile: Profile1D, lam: float) -> Profile1D:
    """Apply ``v(t) -> lam^(-a) v(lam t)`` exactly on the stored samples.

    The transformed grid is ``grid / lam`` and the samples are scaled in
    place -- no re-interpolation happens, so ``lam == 1`` is bit-identical
    and the power solution is a fixed point to a few ulp.
    """
    if not (math.isfinite(lam) and lam > 0.0):
        raise ConfigError(f"scaling factor must be > 0, got {lam!r}")
    a = profile.par.exponent
    sv = lam**-a
    sd = lam ** (1.0 - a)
    slope = None
    if profile.limit_slope is not None:
        slope = lam**profile.par.slope_exponent * profile.limit_slope
    ev = None
    if profile.evaluator is not None:
        base = profile.evaluator

        def ev(t, _base=base, _lam=lam, _sv=sv, _sd=sd):
            v, dv = _base(np.asarray(t, dtype=float) * _lam)
            return _sv * v, _sd * dv

    return Profile1D(
        grid=profile.grid / lam,
        values=sv * profile.values,
        derivs=sd * profile.derivs,
        par=profile.par,
        kind=profile.kind,
        limit_slope=slope,
        evaluator=ev,
    )


def first_integral(par: GammaParam, v, dv):
    """Conserved energy ``dv^2/2 - v^(1-gamma)/(gamma-1)`` along solutions.

    It vanishes identically on the power solution and equals ``M^2/2`` on
    the linear-growth solution with limit slope ``M``.
    """
    vv, scalar = _as_float_array(v, "v")
    dvv = np.asarray(dv, dtype=float)
    if np.any(vv <= 0.0):
        raise ConfigError("first integral requires v > 0")
    e = 0.5 * dvv**2 - vv ** (1.0 - par.gamma) / (par.gamma - 1.0)
    if scalar:
        return float(e)
    return e


# ---------------------------------------------------------------------------
# serialization


def profile_csv_path(base: str | Path) -> Path:
    base = Path(base)
    return base if base.suffix == ".csv" else base.with_suffix(base.suffix + ".csv")


def save_profile(profile: Profile1D, base: str | Path) -> tuple[Path, Path]:
    """Write ``<base>.csv`` (columns ``t,v,dv``) plus a ``<base>.json`` envelope.

    The CSV carries the samples at 15 significant digits (``inf`` appears
    verbatim in the derivative column at ``t == 0``); the envelope carries
    the metadata needed to reconstruct the object: gamma, kind, limit
    slope, and the grid's shape.
    """
    csv_path = profile_csv_path(base)
    json_path = csv_path.with_suffix(".json")
    write_csv(
        csv_path,
        _PROFILE_HEADER,
        zip(profile.grid, profile.values, profile.derivs),
    )
    write_json(
        json_path,
        {
            "format": "singlap.profile.v1",
            "gamma": profile.par.gamma,
            "kind": profile.kind,
            "limit_slope": profile.limit_slope,
            "grid": {
                "points": int(profile.grid.size),
                "t_min": float(profile.grid[0]),
                "t_max": float(profile.grid[-1]),
            },
        },
    )
    return csv_path, json_path


def load_profile(path: str | Path, par: GammaParam | None = None) -> Profile1D:
    """Read a profile written by :func:`save_profile`.

    ``path`` may point at the CSV or the base name.  The JSON envelope
    supplies gamma/kind/limit-slope metadata; if it is absent, ``par``
    must be given and the profile comes back as kind ``raw``.
    """
    csv_path = profile_csv_path(path)
    data = read_csv(csv_path, _PROFILE_HEADER)
    kind = "raw"
    slope = None
    json_path = csv_path.with_suffix(".json")
    if json_path.exists():
        meta = read_json(json_path)
        if meta.get("format") != "singlap.profile.v1":
            raise FormatError(f"{json_path} is not a profile envelope")
        par = gamma_param(meta["gamma"])
        kind = meta.get("kind", "raw")
        slope = meta.get("limit_slope")
        if meta.get("grid", {}).get("points") != data.shape[0]:
            raise FormatError(
                f"envelope announces {meta['grid']['points']} rows, CSV has {data.shape[0]}"
            )
    elif par is None:
        raise ConfigError(f"no envelope next to {csv_path}; pass the gamma parameters")
    return Profile1D(
        grid=data[:, 0],
        values=data[:, 1],
        derivs=data[:, 2],
        par=par,
        kind=kind,
        limit_slope=slope,
    )
