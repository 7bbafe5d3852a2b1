"""Command-line surface: files written, exit codes, config precedence."""

import json

import numpy as np
import pytest

from singlap import Profile1D, eval_power, gamma_param, save_profile


def test_exact_golden_output(tmp_path, cli):
    rc, out, err = cli("exact", "--gamma", "2", "--t-max", "10", "--n", "1000",
                       "--out", str(tmp_path))
    assert rc == 0 and err == ""
    assert "rows = 1001" in out
    csv = tmp_path / "power_profile.csv"
    lines = csv.read_text().splitlines()
    assert len(lines) == 1002  # header + 1001 samples
    assert lines[0] == "t,v,dv"
    assert lines[1] == "0,0,inf"
    env = json.loads((tmp_path / "power_profile.json").read_text())
    assert env["format"] == "singlap.profile.v1"
    assert env["gamma"] == 2.0
    assert env["kind"] == "power"


def test_exact_plot_flag(tmp_path, cli):
    rc, out, _ = cli("exact", "--gamma", "2", "--out", str(tmp_path),
                     "--plot", "--figure-format", "png")
    assert rc == 0
    assert (tmp_path / "power_profile.png").stat().st_size > 500
    assert "wrote" in out


@pytest.mark.parametrize(
    "args",
    [
        ("exact", "--gamma", "0.5"),
        ("exact", "--gamma", "1.0"),
        ("shoot", "--gamma", "2", "--slope", "-1"),
        ("halfplane", "--gamma", "2", "--h", "0.3"),
    ],
)
def test_bad_parameters_exit_two(tmp_path, cli, args):
    rc, out, err = cli(*args, "--out", str(tmp_path))
    assert rc == 2
    assert err.startswith("error:")


def test_unknown_flag_exits_two(tmp_path, cli):
    rc, _, err = cli("exact", "--gamma", "2", "--frobnicate", "--out", str(tmp_path))
    assert rc == 2


def test_missing_required_flag_exits_two(tmp_path, cli):
    rc, _, err = cli("exact", "--out", str(tmp_path))
    assert rc == 2
    assert "gamma" in err


def test_config_file_and_flag_precedence(tmp_path, cli):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"gamma": 2.0, "n": 10}))
    rc, out, _ = cli("exact", "--config", str(cfgfile), "--out", str(tmp_path))
    assert rc == 0 and "rows = 11" in out
    # an explicit flag overrides the file
    rc, out, _ = cli("exact", "--config", str(cfgfile), "--n", "20",
                     "--out", str(tmp_path))
    assert rc == 0 and "rows = 21" in out


def test_config_rejects_unknown_key(tmp_path, cli):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"gamma": 2.0, "shoes": 4}))
    rc, _, err = cli("exact", "--config", str(cfgfile), "--out", str(tmp_path))
    assert rc == 2
    assert "unknown config key 'shoes'" in err


def test_config_rejects_wrong_types(tmp_path, cli):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"gamma": 2.0, "n": 10.5}))
    rc, _, err = cli("exact", "--config", str(cfgfile), "--out", str(tmp_path))
    assert rc == 2


def test_config_rejects_malformed_json(tmp_path, cli):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text("{not json")
    rc, _, err = cli("exact", "--config", str(cfgfile), "--out", str(tmp_path))
    assert rc == 2
    assert "not valid JSON" in err


def test_shoot_writes_report(tmp_path, cli):
    rc, out, err = cli("shoot", "--gamma", "2", "--slope", "1",
                       "--out", str(tmp_path))
    assert rc == 0, err
    rep = json.loads((tmp_path / "shoot_report.json").read_text())
    assert sorted(rep) == [
        "b_fit", "discrepancy_sup_rel", "energy_drift",
        "route_a_slope", "route_b_slope", "tau0",
    ]
    assert abs(rep["route_a_slope"] - 1.0) < 1e-9
    assert rep["discrepancy_sup_rel"] < 1e-4
    assert "limit_slope = " in out
    assert (tmp_path / "profile.csv").exists()
    assert (tmp_path / "profile.json").exists()


def test_verify_passes_on_solved_profile(tmp_path, cli):
    rc, _, _ = cli("shoot", "--gamma", "2", "--slope", "1", "--out", str(tmp_path))
    assert rc == 0
    rc, out, err = cli("verify", "--in", str(tmp_path / "profile.csv"),
                       "--out", str(tmp_path))
    assert rc == 0, err
    assert "5/5 certificates pass" in out
    certs = json.loads((tmp_path / "certificates.json").read_text())
    assert [c["kind"] for c in certs] == [
        "upper_power", "lower_power", "linear_growth",
        "gradient_strip", "gradient_far",
    ]
    assert all(c["pass"] for c in certs)
    # canonical far threshold for profiles: a tenth of the horizon
    assert "x > 1000" in out


def test_verify_flags_spiked_profile(tmp_path, cli):
    par = gamma_param(2.0)
    ts = np.geomspace(1e-4, 1e4, 1201)
    v, dv = eval_power(par, ts)
    v = v.copy()
    # the far region starts at sample 1051, so 1152 is odd *within* it and
    # invisible to the coarse scan; doubling lifts it above the far sup
    v[1152] *= 2.0
    prof = Profile1D(grid=ts, values=v, derivs=dv, par=par, kind="raw")
    save_profile(prof, tmp_path / "spiked")
    rc, out, _ = cli("verify", "--in", str(tmp_path / "spiked.csv"),
                     "--out", str(tmp_path))
    assert rc == 1
    assert "FAIL" in out


def test_verify_reports_corrupt_input(tmp_path, cli):
    rc, _, _ = cli("exact", "--gamma", "2", "--n", "50", "--out", str(tmp_path))
    assert rc == 0
    csv = tmp_path / "power_profile.csv"
    lines = csv.read_text().splitlines()
    lines[5] = "garbage"
    csv.write_text("\n".join(lines) + "\n")
    rc, _, err = cli("verify", "--in", str(csv), "--out", str(tmp_path))
    assert rc == 2
    assert "line 6" in err


def test_scale_subcommand_consistency(tmp_path, cli):
    rc, out, err = cli("scale", "--gamma", "2", "--slope-from", "1",
                       "--slope-to", "2", "--out", str(tmp_path))
    assert rc == 0, err
    rep = json.loads((tmp_path / "scale_report.json").read_text())
    assert rep["passed"] is True
    assert rep["sup_rel_mismatch"] < rep["tolerance"]
    # lambda = (M'/M)^((gamma+1)/(gamma-1)) = 2^3
    assert abs(rep["lambda"] - 8.0) < 1e-9
    assert (tmp_path / "scaled_profile.csv").exists()
    assert (tmp_path / "direct_profile.csv").exists()


def test_halfplane_subcommand(tmp_path, cli):
    rc, out, err = cli("halfplane", "--gamma", "2", "--width", "4",
                       "--height", "2", "--h", "0.25", "--slope", "0",
                       "--out", str(tmp_path))
    assert rc == 0, err
    assert "max_dev = " in out
    max_dev = float(out.split("max_dev = ")[1].split()[0])
    assert max_dev < 1e-10
    rep = json.loads((tmp_path / "halfplane_report.json").read_text())
    assert rep["gamma"] == 2.0
    assert rep["max_dev"] == pytest.approx(max_dev, rel=1e-12)
    assert rep["projections"] == 0
    sym = (tmp_path / "symmetry.csv").read_text().splitlines()
    assert sym[0] == "z,deviation"
    assert len(sym) == 10  # header plus nz + 1 = 9 heights
    assert (tmp_path / "field.csv").exists()
    assert (tmp_path / "field.json").exists()


def test_halfplane_field_round_trips_via_cli_files(tmp_path, cli):
    from singlap import load_field

    rc, *_ = cli("halfplane", "--gamma", "2", "--width", "4", "--height", "2",
                 "--h", "0.25", "--slope", "0", "--out", str(tmp_path))
    assert rc == 0
    field = load_field(tmp_path / "field.csv")
    assert field.values.shape == (17, 9)
    assert field.boundary_mode == "oned_profile"


def test_outputs_are_deterministic(tmp_path, cli):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        rc, *_ = cli("exact", "--gamma", "3", "--n", "100", "--out", str(d),
                     "--plot", "--figure-format", "svg")
        assert rc == 0
    for name in ("power_profile.csv", "power_profile.json", "power_profile.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_report_end_to_end(tmp_path, cli):
    rc, out, err = cli("report", "--gamma", "2", "--slope", "1", "--width", "4",
                       "--height", "2", "--h", "0.25", "--out", str(tmp_path),
                       "--figure-format", "png")
    assert rc == 0, err
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["certificates_passed"] == summary["certificates_total"] == 5
    assert summary["max_dev"] < 1e-10
    assert summary["discrepancy_sup_rel"] < 1e-4
    for name in summary["figures"]:
        assert (tmp_path / name).stat().st_size > 500
    for name in summary["files"]:
        assert (tmp_path / name).exists()
    assert "5/5 certificates pass" in out
    assert sorted(summary["figures"]) == [
        "certificates.png", "field.png", "profile.png", "symmetry.png",
    ]


def test_no_subcommand_exits_two(cli):
    rc, _, err = cli()
    assert rc == 2
