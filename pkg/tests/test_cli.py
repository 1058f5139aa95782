import json

import numpy as np
import pytest

from tomoprop import io as tio
from tomoprop.cli import (
    EXIT_DOMAIN,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_TOLERANCE,
    RunConfig,
    main,
    parse_potential,
)
from tomoprop.errors import InvalidInputError
from tomoprop.greens import FREE, OSCILLATOR

FAST = ["--theta-count", "48", "--x-count", "101"]


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_potential():
    assert parse_potential("free") == FREE
    assert parse_potential("harmonic") == OSCILLATOR
    p = parse_potential("alpha=1,beta=0.3")
    assert p.alpha == 1.0 and p.beta == 0.3
    with pytest.raises(InvalidInputError):
        parse_potential("gamma=2")


def test_config_validation():
    with pytest.raises(InvalidInputError):
        RunConfig(x_count=4).validate()
    with pytest.raises(InvalidInputError):
        RunConfig(route="teleport").validate()
    with pytest.raises(InvalidInputError):
        RunConfig(route="pullback", potential="alpha=1,beta=0.3").validate()
    RunConfig(route="pullback", potential="harmonic").validate()


def test_tomogram_subcommand_writes_files(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, _ = run(["tomogram", "--state", "ho_ground", "-o", str(out)] + FAST, capsys)
    assert code == EXIT_OK
    assert out.exists() and tio.meta_path_for(out).exists()
    meta = json.loads(tio.meta_path_for(out).read_text())
    assert meta["state_spec"] == {"kind": "ho", "n": 0}


def test_oscillator_period_identity(tmp_path, capsys):
    base = tmp_path / "base.csv"
    per = tmp_path / "per.csv"
    assert run(["tomogram", "--state", "ho_ground", "-o", str(base)] + FAST, capsys)[0] == EXIT_OK
    code, _, _ = run(
        ["evolve", "--state", "ho_ground", "--potential", "harmonic", "--route", "pullback",
         "--t", "6.283185307179586", "-o", str(per)] + FAST,
        capsys,
    )
    assert code == EXIT_OK
    code, out, _ = run(["compare", str(base), str(per), "--tol", "1e-6"], capsys)
    assert code == EXIT_OK
    assert json.loads(out.strip())["linf"] < 1e-6


def test_compare_failure_exits_3(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    run(["tomogram", "--state", "ho:0", "-o", str(a)] + FAST, capsys)
    run(["tomogram", "--state", "ho:1", "-o", str(b)] + FAST, capsys)
    code, _, err = run(["compare", str(a), str(b), "--tol", "1e-6"], capsys)
    assert code == EXIT_TOLERANCE
    payload = json.loads(err.strip())
    assert payload["code"] == EXIT_TOLERANCE and "message" in payload and "context" in payload


def test_invalid_pullback_potential_exits_2(tmp_path, capsys):
    code, _, err = run(
        ["evolve", "--route", "pullback", "--potential", "alpha=1,beta=0.3",
         "-o", str(tmp_path / "x.csv")],
        capsys,
    )
    assert code == EXIT_INVALID
    assert json.loads(err.strip())["code"] == EXIT_INVALID


def test_caustic_green_exits_4(tmp_path, capsys):
    code, _, err = run(
        ["green", "--kind", "oscillator", "--t", "3.14159265", "--pos-count", "16",
         "-o", str(tmp_path / "g.csv")],
        capsys,
    )
    assert code == EXIT_DOMAIN
    assert json.loads(err.strip())["code"] == EXIT_DOMAIN


def test_green_subcommand_values(tmp_path, capsys):
    out = tmp_path / "g.csv"
    code, _, _ = run(
        ["green", "--kind", "free", "--t", "1.0", "--pos-lower", "-1", "--pos-upper", "1",
         "--pos-count", "9", "-o", str(out)],
        capsys,
    )
    assert code == EXIT_OK
    header, data = tio.read_grid_csv(out)
    assert header == ["x", "y", "t", "re", "im"]
    from tomoprop.greens import green_free

    row = data[0]
    expected = green_free(row[0], row[1], row[2])
    assert abs(complex(row[3], row[4]) - expected) < 1e-12


def test_kernel_subcommand(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, _, _ = run(
        ["kernel", "--potential", "free", "--t", "1.0", "--k", "0.5,1.0",
         "--frame", "0.3,0.4,0.25,0.7", "-o", str(out)],
        capsys,
    )
    assert code == EXIT_OK
    header, data = tio.read_grid_csv(out)
    assert data.shape[0] == 2 and data[0, 0] == 0.5


def test_reconstruct_subcommand(tmp_path, capsys):
    # reconstruction accuracy needs a denser tomogram than the other tests
    base = tmp_path / "t.csv"
    run(
        ["tomogram", "--state", "ho_ground", "-o", str(base),
         "--theta-count", "96", "--x-count", "201"],
        capsys,
    )
    code, out, _ = run(
        ["reconstruct", str(base), "-o", str(tmp_path / "rho.csv"), "--pos-count", "64",
         "--pos-lower", "-6", "--pos-upper", "6"],
        capsys,
    )
    assert code == EXIT_OK
    report = json.loads(out.strip())
    assert report["trace"] == pytest.approx(1.0, abs=1e-2)
    rho = tio.read_density(tmp_path / "rho.real.csv")
    x = rho.grid.points
    expected = np.exp(-0.5 * (x[:, None] ** 2 + x[None, :] ** 2)) / np.sqrt(np.pi)
    assert np.abs(rho.values - expected).max() < 1e-3


def test_config_file_with_flag_override(tmp_path, capsys):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"state": "ho:1", "theta_count": 48, "x_count": 101}))
    out = tmp_path / "t.csv"
    code, _, _ = run(["tomogram", "--config", str(conf), "--state", "ho:2", "-o", str(out)], capsys)
    assert code == EXIT_OK
    meta = json.loads(tio.meta_path_for(out).read_text())
    assert meta["state_spec"]["n"] == 2
    assert meta["config"]["theta_count"] == 48


def test_unknown_config_key_exits_2(tmp_path, capsys):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"statee": "ho:1"}))
    code, _, err = run(["tomogram", "--config", str(conf)], capsys)
    assert code == EXIT_INVALID


def test_byte_identical_reruns(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["tomogram", "--state", "gaussian:1,0.5,1"] + FAST
    run(args + ["-o", str(a)], capsys)
    run(args + ["-o", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()
