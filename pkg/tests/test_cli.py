import json
import subprocess
import sys
from pathlib import Path

import pytest

from conslab.cli import main

DEMOS = Path(__file__).resolve().parents[1] / "demos" / "configs"

SMALL = """
[experiment]
methods = godunov, viscous
ladder = 40, 80
times = 0.5, 1.0

[flux]
family = burgers

[initial]
kind = riemann
u_minus = -1
u_plus = 1
x_min = -2
x_max = 2

[tolerances]
pairwise_l1 = {tol}
monotone = true
"""


@pytest.fixture
def small(tmp_path):
    def make(tol=0.2):
        path = tmp_path / "small.ini"
        path.write_text(SMALL.format(tol=tol))
        return str(path)
    return make


def test_compare_passes_with_exit_zero(small, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["compare", "--config", small(), "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "PASS pairwise_l1" in lines[0] and lines[-1].startswith("report:")
    names = sorted(p.name for p in out.iterdir())
    assert "report.json" in names
    assert "snapshot_godunov_0.05_1.csv" in names and "snapshot_viscous_0.1_0.5.csv" in names
    assert len(names) == 1 + 2 * 2 * 2
    assert (out / "snapshot_godunov_0.05_1.csv").read_text().startswith("x,u\n")


def test_failed_tolerance_exits_one(small, tmp_path, capsys):
    assert main(["compare", "--config", small(1e-9), "--out", str(tmp_path / "o")]) == 1
    assert "FAIL pairwise_l1" in capsys.readouterr().out


def test_config_error_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nmethods = nothing\n")
    assert main(["solve", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_json_snapshots(small, tmp_path):
    out = tmp_path / "j"
    assert main(["solve", "--config", small(), "--out", str(out), "--format", "json"]) == 0
    data = json.loads((out / "snapshot_viscous_0.05_1.json").read_text())
    assert len(data["x"]) == len(data["u"]) == 81


def test_reports_are_byte_identical(small, tmp_path):
    for d in ("a", "b"):
        main(["compare", "--config", small(), "--out", str(tmp_path / d)])
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    assert ((tmp_path / "a" / "snapshot_viscous_0.05_1.csv").read_bytes()
            == (tmp_path / "b" / "snapshot_viscous_0.05_1.csv").read_bytes())


def test_riemann_prints_verdict(tmp_path, capsys):
    assert main(["riemann", "--config", str(DEMOS / "riemann_rankine.ini"), "--out", str(tmp_path)]) == 0
    verdict = json.loads(capsys.readouterr().out)
    assert set(verdict) == {"speed", "lax", "e_condition", "witness", "admissible_interval"}
    assert verdict["speed"] == 0.0 and verdict["lax"] is False and verdict["e_condition"] is False
    assert json.loads((tmp_path / "report.json").read_text()) == verdict


def test_unknown_format_rejected(small):
    with pytest.raises(SystemExit):
        main(["solve", "--config", small(), "--format", "xml"])


def test_module_entry_point(small, tmp_path):
    cfg = Path(small())
    cfg.write_text(cfg.read_text().replace("ladder = 40, 80", "ladder = 40, 80, 160"))
    proc = subprocess.run([sys.executable, "-m", "conslab", "order", "--config", str(cfg),
                           "--out", str(tmp_path / "m")], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    report = json.loads((tmp_path / "m" / "report.json").read_text())
    assert set(report["orders"]) == {"godunov", "viscous"}


@pytest.mark.parametrize("name", sorted(p.name for p in DEMOS.glob("*.ini")))
def test_demo_configs_parse(name):
    from conslab.harness import load_config
    cfg = load_config(DEMOS / name)
    assert cfg.methods
