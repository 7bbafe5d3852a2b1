"""Figure rendering: one helper per artifact, deterministic bytes."""

import numpy as np
import pytest

from singlap import (
    ConfigError,
    StripSpec,
    boundary_from_power,
    build_grid,
    gamma_param,
    run_standard_checks,
    solve,
    symmetry_deviation,
)
from singlap.plots import (
    save_certificate_plot,
    save_field_plot,
    save_profile_plot,
    save_symmetry_plot,
)


@pytest.fixture(scope="module")
def small_field():
    par = gamma_param(2.0)
    grid = build_grid(4.0, 2.0, 0.25)
    field, _ = solve(par, grid, boundary_from_power(par, grid))
    return field


def test_profile_plot_formats(tmp_path, profile_m1):
    prof, _ = profile_m1
    for suffix in (".png", ".svg", ".pdf"):
        out = save_profile_plot(prof, tmp_path / f"p{suffix}")
        assert out.endswith(suffix)
        data = (tmp_path / f"p{suffix}").read_bytes()
        assert len(data) > 500


def test_profile_plot_rejects_unknown_format(tmp_path, profile_m1):
    prof, _ = profile_m1
    with pytest.raises(ConfigError, match=r"\.bmp"):
        save_profile_plot(prof, tmp_path / "p.bmp")


def test_certificate_plot(tmp_path, profile_m1):
    prof, _ = profile_m1
    certs = run_standard_checks(prof, StripSpec(height=1.0))
    out = save_certificate_plot(certs, tmp_path / "c.svg")
    text = (tmp_path / "c.svg").read_text()
    assert "certificates pass" in text


def test_field_and_symmetry_plots(tmp_path, small_field):
    save_field_plot(small_field, tmp_path / "f.png")
    per_row, _ = symmetry_deviation(small_field)
    save_symmetry_plot(small_field, tmp_path / "s.png")
    assert (tmp_path / "f.png").stat().st_size > 500
    assert (tmp_path / "s.png").stat().st_size > 500


@pytest.mark.parametrize("suffix", [".png", ".svg", ".pdf"])
def test_renders_are_byte_deterministic(tmp_path, profile_m1, suffix):
    prof, _ = profile_m1
    a = tmp_path / f"a{suffix}"
    b = tmp_path / f"b{suffix}"
    save_profile_plot(prof, a)
    save_profile_plot(prof, b)
    assert a.read_bytes() == b.read_bytes()


def test_certificate_plot_marks_failures(tmp_path):
    # a synthetic failing certificate must flip the pass count in the title
    from singlap.certificates import BoundCertificate

    good = BoundCertificate(
        kind="upper_power", region="0 < x <= 1", empirical_constant=1.9,
        margin=0.01, passed=True, samples=100, refinement_drift=0.0,
    )
    bad = BoundCertificate(
        kind="linear_growth", region="x > 10", empirical_constant=1.5,
        margin=-0.2, passed=False, samples=50, refinement_drift=0.3,
    )
    save_certificate_plot([good, bad], tmp_path / "cm.svg")
    text = (tmp_path / "cm.svg").read_text()
    assert "1/2 certificates pass" in text
