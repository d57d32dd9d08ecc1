import json
import subprocess
import sys
from pathlib import Path

import pytest

from nullhyper import __version__
from nullhyper.cli import (
    ENV_MODE,
    ENV_TOL,
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_CONSTRUCTION,
    EXIT_OK,
    Settings,
    main,
)
from nullhyper.runner import ConfigError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = """
model = "s2xs2"
checks = ["nullity", "eigenvalues"]
[hypersurface]
kind = "sigma-t"
t = {t}
[grid]
counts = [2, 2, 2]
"""


@pytest.fixture
def small(tmp_path):
    def make(t=0.5, text=None):
        p = tmp_path / "scenario.toml"
        p.write_text(text if text is not None else SMALL.format(t=t))
        return p
    return make


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(ENV_TOL, raising=False)
    monkeypatch.delenv(ENV_MODE, raising=False)


def test_version(capsys):
    assert main(["version"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == __version__


def test_list_checks(capsys):
    assert main(["list-checks"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("nullity", "eigenvalues", "gauge-invariance", "angle-identity"):
        assert name in out


def test_verify_pass_writes_reports(small, tmp_path, capsys):
    js, md = tmp_path / "out" / "r.json", tmp_path / "out" / "r.md"
    assert main(["verify", str(small()), "--json", str(js), "--md", str(md)]) == EXIT_OK
    doc = json.loads(js.read_text())
    assert doc["schema_version"] == 1 and doc["overall"] == "pass"
    assert md.read_text().startswith("# Scenario `scenario`")
    assert "PASS" in capsys.readouterr().out


def test_verify_check_failure(capsys):
    assert main(["verify", str(CONFIGS / "connection_strict.toml"), "--quiet"]) == EXIT_CHECK_FAILED
    assert capsys.readouterr().out == ""


def test_verify_config_error(small, capsys):
    p = small(text=SMALL.format(t=0.5).replace("nullity", "nullness"))
    assert main(["verify", str(p)]) == EXIT_CONFIG
    assert "unknown check names" in capsys.readouterr().err


def test_verify_missing_file(tmp_path):
    assert main(["verify", str(tmp_path / "nope.toml")]) == EXIT_CONFIG


def test_verify_construction_error(small, capsys):
    assert main(["verify", str(small(t=1.5))]) == EXIT_CONSTRUCTION
    assert "construction error" in capsys.readouterr().err


def test_env_default_tolerance(small, tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_TOL, "1e-30")
    assert main(["verify", str(small()), "--quiet"]) == EXIT_CHECK_FAILED
    monkeypatch.setenv(ENV_TOL, "1e-3")
    js = tmp_path / "r.json"
    assert main(["verify", str(small()), "--quiet", "--json", str(js)]) == EXIT_OK
    assert {c["tolerance"] for c in json.loads(js.read_text())["checks"]} == {1e-3}


def test_env_forced_fd(small, tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_MODE, "fd")
    js = tmp_path / "r.json"
    assert main(["verify", str(small()), "--quiet", "--json", str(js)]) == EXIT_OK
    assert json.loads(js.read_text())["environment"]["derivative_mode"] == "fd"


@pytest.mark.parametrize("env", [{ENV_TOL: "abc"}, {ENV_TOL: "-1"}, {ENV_MODE: "symbolic"}])
def test_bad_env(env, small, monkeypatch):
    for k, v in env.items():
        monkeypatch.setenv(k, v)
    assert main(["verify", str(small())]) == EXIT_CONFIG
    with pytest.raises(ConfigError):
        Settings.from_env(env)


def test_settings_defaults():
    assert Settings.from_env({}) == Settings(None, False)
    assert Settings.from_env({ENV_MODE: "JET"}).force_fd is False


def test_sweep_outputs(tmp_path, capsys):
    js, md = tmp_path / "s.json", tmp_path / "s.md"
    code = main(["sweep", "sigma-t", "--space", "h2xh2", "--t", "0,0.5", "--json", str(js), "--md", str(md)])
    assert code == EXIT_OK
    doc = json.loads(js.read_text())
    assert doc["space"] == "h2xh2" and [r["t"] for r in doc["rows"]] == [0.0, 0.5]
    assert all(r["delta_lambda"] < 1e-6 for r in doc["rows"])
    assert md.read_text() == capsys.readouterr().out


def test_sweep_bad_t():
    assert main(["sweep", "sigma-t", "--space", "s2xs2", "--t", "0.2,1.0"]) == EXIT_CONFIG
    with pytest.raises(SystemExit):
        main(["sweep", "sigma-t", "--space", "s2xs2", "--t", "x"])


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "nullhyper.cli", "version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == __version__
