import numpy as np
import orjson
import pytest
from typer.testing import CliRunner

from santalo.bodies.service import cube
from santalo.cli import app

runner = CliRunner()

SMALL = ["--samples", "1000", "--seed", "11"]


def test_degree_one_is_refused(tmp_path):
    result = runner.invoke(
        app, ["--out", str(tmp_path), *SMALL, "verify-santalo", "--k", "3", "--j", "1"]
    )
    assert result.exit_code == 1
    assert not list(tmp_path.glob("*.json"))


def test_radial_check_writes_report(tmp_path):
    result = runner.invoke(
        app,
        [
            "--out", str(tmp_path), *SMALL,
            "radial-check", "--corpus", "ball", "--n", "2", "--k", "2",
            "--tuples", "1", "--directions", "50",
        ],
    )
    assert result.exit_code == 0, result.output
    reports = list(tmp_path.glob("radial-check-*.json"))
    assert len(reports) == 1
    data = orjson.loads(reports[0].read_bytes())
    assert data["cases"][0]["verdict"] == "PASS"


def test_config_file_is_read_and_options_win(tmp_path):
    config = tmp_path / "campaign.toml"
    config.write_text(
        '[radial-check]\ncorpus = "ball"\nn = 2\nk = 2\ntuples = 3\ndirections = 50\n'
    )
    out = tmp_path / "reports"
    result = runner.invoke(
        app,
        ["--config", str(config), "--out", str(out), *SMALL, "radial-check", "--tuples", "2"],
    )
    assert result.exit_code == 0, result.output
    (report,) = out.glob("*.json")
    data = orjson.loads(report.read_bytes())
    assert len(data["cases"]) == 2
    assert data["config"]["seed"] == 11


def test_invalid_config_exits_one(tmp_path):
    config = tmp_path / "bad.toml"
    config.write_text("[verify-santalo]\nk = 1\n")
    result = runner.invoke(
        app, ["--config", str(config), "--out", str(tmp_path), "verify-santalo"]
    )
    assert result.exit_code == 1


def test_polar_prints_halfspaces(tmp_path):
    path = cube(2).dump(tmp_path / "square.txt")
    result = runner.invoke(app, ["polar", str(path), "--j", "2"])
    assert result.exit_code == 0, result.output
    header = result.stdout.splitlines()[0]
    assert header.split()[0] == "2"


def test_polar_writes_file(tmp_path):
    path = cube(2).dump(tmp_path / "square.txt")
    target = tmp_path / "polar.txt"
    result = runner.invoke(app, ["polar", str(path), "--write", str(target)])
    assert result.exit_code == 0, result.output
    assert target.read_text().startswith("2 ")


def test_analytic_ball_volume():
    result = runner.invoke(
        app, ["volume", "--lp-n", "2", "--lp-p", "2", "--method", "analytic"]
    )
    assert result.exit_code == 0, result.output
    assert orjson.loads(result.stdout)["value"] == pytest.approx(np.pi)


def test_volume_needs_a_body():
    result = runner.invoke(app, ["volume", "--lp-n", "2"])
    assert result.exit_code == 1


def test_ball_value_of_square_files(tmp_path):
    path = cube(2).dump(tmp_path / "square.txt")
    result = runner.invoke(app, ["ball", str(path), str(path), "--j", "2"])
    assert result.exit_code == 0, result.output
    assert orjson.loads(result.stdout)["value"] == pytest.approx(32.0 / 9.0)
