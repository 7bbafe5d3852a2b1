"""Machine-checkable bound certificates for sampled profiles and fields.

Each check scans the stored samples of a one-dimensional profile (or a
two-dimensional field, duck-typed by ``values.ndim == 2``) and records the
best empirical constant of a power-law or linear inequality, together with
a refinement-stability margin: the constant is re-measured on a nested
half-density subset, and the certificate passes only when the full-density
constant stays within 1% of it.  Certificates report empirical constants
-- the underlying inequalities hold with *some* constant, so the only
machine-checkable content is the measured value and its stability.

The module also builds the one-dimensional eigenfunction subsolution: the
largest multiple of ``cos(pi (x-c) / (2 r))^(2/(gamma+1))`` that satisfies
``-w'' <= w^(-gamma)`` on the interval, found by bisection on a
scale-invariant amplitude parameter so that the construction commutes
exactly with dilations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericsError
from .profiles import GammaParam, Profile1D, StripSpec

CERTIFICATE_KINDS = (
    "upper_power",
    "lower_power",
    "linear_growth",
    "gradient_strip",
    "gradient_far",
)

#: samples below this many grid spacings from the bottom are excluded from
#: two-dimensional gradient scans (one-sided stencils at the singular edge
#: would pollute the exponent fit)
BOTTOM_EXCLUSION_ROWS = 4

#: default window for the log-log exponent fit of the gradient decay
EXPONENT_FIT_WINDOW = (1e-4, 1e-2)

_TINY = 1e-300


@dataclass(frozen=True)
class BoundCertificate:
    """Outcome of one inequality scan.

    ``empirical_constant`` is the sup (or inf) of the scanned ratio,
    attained at one of the ``samples``; ``margin`` is the minimum signed
    slack of the full-density samples against the 1%-inflated (resp.
    deflated) constant of the nested coarse subset, normalized by the
    constant -- so ``passed`` is exactly ``margin >= 0``.
    ``refinement_drift`` is the relative change of the constant between
    the two densities.  ``details`` carries check-specific extras (affine
    fits, exponent fits) and is not serialized.
    """

    kind: str
    region: str
    empirical_constant: float
    margin: float
    passed: bool
    samples: int
    refinement_drift: float
    details: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in CERTIFICATE_KINDS:
            raise ConfigError(f"unknown certificate kind {self.kind!r}")
        if self.samples < 1:
            raise ConfigError("a certificate needs at least one sample")

    def to_dict(self) -> dict:
        """The serialized form: exactly the documented seven keys."""
        return {
            "kind": self.kind,
            "region": self.region,
            "empirical_constant": self.empirical_constant,
            "margin": self.margin,
            "pass": self.passed,
            "samples": self.samples,
            "refinement_drift": self.refinement_drift,
        }


def _is_field(obj) -> bool:
    values = getattr(obj, "values", None)
    return values is not None and getattr(values, "ndim", 1) == 2


def _nested_coarse(arr: np.ndarray) -> np.ndarray:
    """Half-density nested subset: every other sample plus the last one."""
    return np.concatenate([arr[::2], arr[-1:]])


def _nested_coarse_2d(arr: np.ndarray) -> np.ndarray:
    """Every other row and column, keeping the last row and column."""
    return np.concatenate(
        [arr[::2, ::2].ravel(), arr[-1, :].ravel(), arr[:, -1].ravel()]
    )


def _sup_cert(kind, region, fine, coarse, details=None) -> BoundCertificate:
    c_fine = float(np.max(fine))
    c_coarse = float(np.max(coarse))
    if not math.isfinite(c_fine):
        raise NumericsError(f"{kind} scan produced a non-finite constant")
    drift = abs(c_fine - c_coarse) / max(abs(c_fine), _TINY)
    margin = (1.01 * c_coarse - c_fine) / max(abs(c_fine), _TINY)
    return BoundCertificate(
        kind=kind,
        region=region,
        empirical_constant=c_fine,
        margin=margin,
        passed=margin >= 0.0,
        samples=int(np.size(fine)),
        refinement_drift=drift,
        details=details or {},
    )


def _inf_cert(kind, region, fine, coarse, details=None) -> BoundCertificate:
    c_fine = float(np.min(fine))
    c_coarse = float(np.min(coarse))
    if not math.isfinite(c_fine):
        raise NumericsError(f"{kind} scan produced a non-finite constant")
    drift = abs(c_fine - c_coarse) / max(abs(c_fine), _TINY)
    margin = (c_fine - 0.99 * c_coarse) / max(abs(c_fine), _TINY)
    return BoundCertificate(
        kind=kind,
        region=region,
        empirical_constant=c_fine,
        margin=margin,
        passed=margin >= 0.0 and c_fine > 0.0,
        samples=int(np.size(fine)),
        refinement_drift=drift,
        details=details or {},
    )


def _profile_strip_arrays(p: Profile1D, height: float | None):
    """Stored samples with ``0 < x`` (and ``x <= height`` when given)."""
    mask = p.grid > 0.0
    if height is not None:
        mask &= p.grid <= height
    return p.grid[mask], p.values[mask], p.derivs[mask]


def _field_distance_mask(obj, lo: float, hi: float | None):
    zs = np.asarray(obj.grid.zs, dtype=float)
    mask = zs > lo
    if hi is not None:
        mask &= zs <= hi
    return zs, mask


def check_upper_power(p, strip: StripSpec) -> BoundCertificate:
    """Scan ``u / x^(2/(gamma+1))`` over the boundary strip from above.

    The empirical constant is the sup of the ratio over all samples with
    ``0 < x <= strip.height``; the certificate passes when the sup is
    stable (within 1%) under halving the sample density.
    """
    region = f"0 < x <= {strip.height:g}"
    if _is_field(p):
        zs, mask = _field_distance_mask(p, 0.0, strip.height)
        if not mask.any():
            raise ConfigError(f"no field rows inside the strip ({region})")
        if strip.height > float(zs[-1]):
            raise ConfigError(
                f"strip height {strip.height:g} exceeds the field height {zs[-1]:g}"
            )
        ratios = p.values[:, mask] / zs[np.newaxis, mask] ** p.par.exponent
        return _sup_cert(
            "upper_power", region, ratios, _nested_coarse_2d(ratios)
        )
    if strip.height > p.t_max:
        raise ConfigError(
            f"strip height {strip.height:g} exceeds the profile interval {p.t_max:g}"
        )
    x, u, _ = _profile_strip_arrays(p, strip.height)
    if x.size == 0:
        raise ConfigError(f"no profile samples inside the strip ({region})")
    ratios = u / x**p.par.exponent
    return _sup_cert("upper_power", region, ratios, _nested_coarse(ratios))


def check_lower_power(p) -> BoundCertificate:
    """Scan ``u / x^(2/(gamma+1))`` over all interior samples from below.

    Positivity of the infimum certifies the two-sided power pinch near the
    boundary together with :func:`check_upper_power`.
    """
    region = "x > 0"
    if _is_field(p):
        zs, mask = _field_distance_mask(p, 0.0, None)
        inner = p.values[:, mask]
        if np.any(inner <= 0.0):
            raise NumericsError(
                "field has nonpositive interior values; positivity is an "
                "invariant of admissible fields, so no certificate is issued"
            )
        ratios = inner / zs[np.newaxis, mask] ** p.par.exponent
        return _inf_cert(
            "lower_power", region, ratios, _nested_coarse_2d(ratios)
        )
    x, u, _ = _profile_strip_arrays(p, None)
    if x.size == 0:
        raise ConfigError("profile has no interior samples")
    ratios = u / x**p.par.exponent
    return _inf_cert("lower_power", region, ratios, _nested_coarse(ratios))


def check_linear_growth(p, strip: StripSpec) -> BoundCertificate:
    """Scan ``u / x`` beyond the strip and fit the affine envelope.

    The empirical constant is the sup of ``u / x`` over samples with
    ``x > strip.height``; the details carry the least-squares affine fit
    ``u ~ c1 + c2 x`` over the same far region.
    """
    region = f"x > {strip.height:g}"
    if _is_field(p):
        zs, mask = _field_distance_mask(p, strip.height, None)
        if not mask.any():
            raise ConfigError(f"field does not extend beyond the strip ({region})")
        ratios = p.values[:, mask] / zs[np.newaxis, mask]
        zz = np.broadcast_to(zs[np.newaxis, mask], ratios.shape).ravel()
        uu = p.values[:, mask].ravel()
        coarse = _nested_coarse_2d(ratios)
    else:
        x, u, _ = _profile_strip_arrays(p, None)
        far = x > strip.height
        if not far.any():
            raise ConfigError(f"profile does not extend beyond the strip ({region})")
        zz, uu = x[far], u[far]
        ratios = uu / zz
        coarse = _nested_coarse(ratios)
    basis = np.stack([np.ones_like(zz), zz], axis=1)
    (c1, c2), *_ = np.linalg.lstsq(basis, uu, rcond=None)
    details = {"affine_fit": (float(c1), float(c2))}
    return _sup_cert("linear_growth", region, ratios, coarse, details)


def _exponent_fit(x: np.ndarray, g: np.ndarray) -> tuple[float, tuple[float, float]]:
    """Slope of log|du| against log x, preferring the standard window."""
    lo, hi = EXPONENT_FIT_WINDOW
    win = (x >= lo) & (x <= hi)
    if np.count_nonzero(win) < 2:
        win = np.ones_like(x, dtype=bool)
        lo, hi = float(np.min(x)), float(np.max(x))
    lx, lg = np.log(x[win]), np.log(g[win])
    slope, _ = np.polyfit(lx, lg, 1)
    return float(slope), (lo, hi)


def check_gradient(p, strip: StripSpec) -> tuple[BoundCertificate, BoundCertificate]:
    """Certify gradient decay in the strip and gradient boundedness outside.

    Returns a pair: the strip certificate scans
    ``|du| * x^((gamma-1)/(gamma+1))`` over ``0 < x <= strip.height`` and
    carries the log-log fitted decay exponent in its details; the far
    certificate scans ``|du|`` over ``x > strip.height``.

    Profiles use their stored derivative samples; fields use centered
    differences on interior nodes at least ``BOTTOM_EXCLUSION_ROWS`` grid
    spacings above the bottom edge.
    """
    weight_exp = -p.par.grad_exponent  # (gamma-1)/(gamma+1) > 0
    region_strip = f"0 < x <= {strip.height:g}"
    region_far = f"x > {strip.height:g}"
    if _is_field(p):
        hx, hz = p.grid.hx, p.grid.hz
        U = p.values
        ux = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2.0 * hx)
        uz = (U[1:-1, 2:] - U[1:-1, :-2]) / (2.0 * hz)
        grad = np.hypot(ux, uz)
        z_in = np.asarray(p.grid.zs, dtype=float)[1:-1]
        keep = z_in >= BOTTOM_EXCLUSION_ROWS * hz
        grad, z_in = grad[:, keep], z_in[keep]
        s_mask = z_in <= strip.height
        f_mask = z_in > strip.height
        if np.count_nonzero(s_mask) < 8:
            raise ConfigError(
                f"strip contains {np.count_nonzero(s_mask)} usable rows; "
                "at least 8 are needed for the gradient scan"
            )
        if not f_mask.any():
            raise ConfigError(f"field has no rows beyond the strip ({region_far})")
        gs = grad[:, s_mask]
        zsr = np.broadcast_to(z_in[np.newaxis, s_mask], gs.shape)
        strip_ratios = gs * zsr**weight_exp
        exponent, window = _exponent_fit(zsr.ravel(), np.maximum(gs.ravel(), _TINY))
        far_vals = grad[:, f_mask]
        cert_strip = _sup_cert(
            "gradient_strip",
            region_strip,
            strip_ratios,
            _nested_coarse_2d(strip_ratios),
            {"exponent_fit": exponent, "fit_window": window},
        )
        cert_far = _sup_cert(
            "gradient_far", region_far, far_vals, _nested_coarse_2d(far_vals)
        )
        return cert_strip, cert_far
    x, _, du = _profile_strip_arrays(p, None)
    finite = np.isfinite(du)
    x, du = x[finite], np.abs(du[finite])
    s_mask = x <= strip.height
    f_mask = x > strip.height
    if np.count_nonzero(s_mask) < 8:
        raise ConfigError(
            f"strip contains {np.count_nonzero(s_mask)} usable samples; "
            "at least 8 are needed for the gradient scan"
        )
    if not f_mask.any():
        raise ConfigError(f"profile has no samples beyond the strip ({region_far})")
    strip_ratios = du[s_mask] * x[s_mask] ** weight_exp
    exponent, window = _exponent_fit(x[s_mask], np.maximum(du[s_mask], _TINY))
    cert_strip = _sup_cert(
        "gradient_strip",
        region_strip,
        strip_ratios,
        _nested_coarse(strip_ratios),
        {"exponent_fit": exponent, "fit_window": window},
    )
    cert_far = _sup_cert(
        "gradient_far", region_far, du[f_mask], _nested_coarse(du[f_mask])
    )
    return cert_strip, cert_far


def run_standard_checks(p, strip: StripSpec, far: StripSpec | None = None) -> list:
    """All five certificates in canonical order.

    ``strip`` feeds the power and gradient-decay scans; ``far`` (when
    given) sets the threshold for the linear-growth and far-gradient
    scans, defaulting to ``strip`` itself.
    """
    far = far or strip
    cert_up = check_upper_power(p, strip)
    cert_lo = check_lower_power(p)
    cert_lin = check_linear_growth(p, far)
    cert_gs, _ = check_gradient(p, strip)
    _, cert_gf = check_gradient(p, far)
    return [cert_up, cert_lo, cert_lin, cert_gs, cert_gf]


# ---------------------------------------------------------------------------
# eigenfunction subsolution on an interval
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalSubsolution:
    """The eigenfunction subsolution ``w = C phi^(2/(gamma+1))`` on an interval.

    ``phi(x) = cos(pi (x - center) / (2 radius))`` is the first Dirichlet
    eigenfunction of the interval and ``lambda1`` its eigenvalue; the
    amplitude is the largest ``C`` for which the pointwise verification
    function :meth:`alpha` stays below ``1 - 1e-6``, which algebraically
    forces ``-w'' <= w^(-gamma)``.  The parameter set carries ``par``
    because the profile exponent enters both the shape and the residual.
    """

    par: GammaParam
    center: float
    radius: float
    amplitude: float
    lambda1: float

    @property
    def interval(self) -> tuple[float, float]:
        return (self.center - self.radius, self.center + self.radius)

    def _phase(self, x):
        xx = np.asarray(x, dtype=float)
        lo, hi = self.interval
        if np.any(xx < lo) or np.any(xx > hi):
            raise ConfigError("evaluation outside the subsolution's interval")
        return 0.5 * math.pi * (xx - self.center) / self.radius

    def eval(self, x) -> np.ndarray:
        """The subsolution values ``C cos(...)^(2/(gamma+1))``."""
        return self.amplitude * np.cos(self._phase(x)) ** self.par.exponent

    def alpha(self, x) -> np.ndarray:
        """Verification function; ``alpha < 1`` certifies the subsolution.

        ``alpha = (2 C^(g+1) (g-1)/(g+1)^2) phi'^2
        + (2 lambda1 C^(g+1)/(g+1)) phi^2`` equals exactly the ratio
        ``-w'' / w^(-gamma)`` wherever ``w > 0``.
        """
        g = self.par.gamma
        th = self._phase(x)
        cg1 = self.amplitude ** (g + 1.0)
        dphi2 = self.lambda1 * np.sin(th) ** 2
        return (2.0 * cg1 * (g - 1.0) / (g + 1.0) ** 2) * dphi2 + (
            2.0 * self.lambda1 * cg1 / (g + 1.0)
        ) * np.cos(th) ** 2


#: bisection keeps max alpha inside this window below 1
_ALPHA_TARGET = 1.0 - 1e-6
_ALPHA_SLACK = 1.0 - 1e-5


def build_interval_subsolution(
    par: GammaParam, center: float, radius: float
) -> IntervalSubsolution:
    """Largest-amplitude eigenfunction subsolution on the given interval.

    Bisects on the scale-free parameter ``xi = lambda1 * C^(gamma+1)`` (the
    verification function depends on position only through the normalized
    coordinate, so the accepted ``xi`` is identical for every radius and
    the amplitude transforms exactly as ``radius^(2/(gamma+1))``).  The
    accepted amplitude has sampled ``max alpha`` inside
    ``[1 - 1e-5, 1 - 1e-6)``; a finite-difference residual check at three
    refinements confirms the subsolution inequality to truncation order.
    """
    if not (math.isfinite(center)):
        raise ConfigError(f"interval center must be finite, got {center!r}")
    if not (math.isfinite(radius) and radius > 0.0):
        raise ConfigError(f"interval radius must be > 0, got {radius!r}")
    g = par.gamma
    lam1 = (math.pi / (2.0 * radius)) ** 2

    # normalized verification profile: alpha(y) = xi * q(y) with
    # q(y) = (2(g-1)/(g+1)^2) sin^2 + (2/(g+1)) cos^2 on y in [-1, 1]
    y = np.linspace(-1.0, 1.0, 4097)
    th = 0.5 * math.pi * y
    q = (2.0 * (g - 1.0) / (g + 1.0) ** 2) * np.sin(th) ** 2 + (
        2.0 / (g + 1.0)
    ) * np.cos(th) ** 2
    q_max = float(np.max(q))

    xi_lo = 0.9 * _ALPHA_TARGET / q_max
    xi_hi = 1.1 * _ALPHA_TARGET / q_max
    if xi_lo * q_max >= _ALPHA_TARGET or xi_hi * q_max <= _ALPHA_TARGET:
        raise NumericsError("bisection bracket failed to straddle the target")
    for _ in range(64):
        if xi_lo * q_max >= _ALPHA_SLACK:
            break
        mid = 0.5 * (xi_lo + xi_hi)
        if mid * q_max < _ALPHA_TARGET:
            xi_lo = mid
        else:
            xi_hi = mid
    else:
        raise NumericsError("amplitude bisection failed to converge")

    amplitude = (xi_lo / lam1) ** (1.0 / (g + 1.0))
    sub = IntervalSubsolution(
        par=par, center=center, radius=radius, amplitude=amplitude, lambda1=lam1
    )

    # sampled finite-difference confirmation on the inner 90% of the
    # interval: the positive part of -D2w - w^(-gamma) must shrink at the
    # h^2 truncation rate under two refinements (the true residual is
    # strictly negative; what the stencil sees on top of it is truncation)
    prev = None
    for n in (1024, 2048, 4096):
        h = 1.8 * radius / n
        xx = center + np.linspace(-0.9 * radius - h, 0.9 * radius + h, n + 3)
        w = sub.eval(xx)
        d2 = (w[2:] - 2.0 * w[1:-1] + w[:-2]) / h**2
        resid = -d2 - w[1:-1] ** (-g)
        pos = float(max(np.max(resid), 0.0))
        if prev is not None and pos > max(prev / 3.0, 1e-10):
            raise NumericsError(
                f"subsolution residual {pos:.3e} does not decay at truncation "
                f"order under refinement (previous {prev:.3e})"
            )
        prev = pos
    return sub
