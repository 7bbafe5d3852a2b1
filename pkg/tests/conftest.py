"""Shared fixtures: the expensive solves are built once per session."""

import pytest

from singlap import gamma_param, solve_prescribed_slope


@pytest.fixture(scope="session")
def par2():
    return gamma_param(2.0)


@pytest.fixture(scope="session")
def profile_m1(par2):
    """The canonical gamma=2, slope-1 solution with its cross-check report."""
    return solve_prescribed_slope(par2, 1.0)


@pytest.fixture(scope="session")
def slope_matrix():
    """(gamma, slope) -> (profile, report) over the standard test matrix."""
    out = {}
    for g in (1.5, 2.0, 3.0):
        par = gamma_param(g)
        for m in (0.5, 1.0, 4.0):
            out[(g, m)] = solve_prescribed_slope(par, m)
    return out


@pytest.fixture()
def cli(capsys):
    """Run the command line in-process; returns (exit_code, stdout, stderr)."""
    from singlap.cli import main

    def run(*args):
        rc = main([str(a) for a in args])
        cap = capsys.readouterr()
        return rc, cap.out, cap.err

    return run
