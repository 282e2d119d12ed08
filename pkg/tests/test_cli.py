import json
import subprocess
import sys

import pytest

from looplab import __version__
from looplab.cli import main, run_command


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.delenv("LOOPLAB_OUT", raising=False)
    return tmp_path


def run(out, *argv):
    return run_command([*argv, "--out", str(out)])


def load(path):
    return json.loads(open(path, encoding="utf-8").read())


def test_enumerate(out):
    r = run(out, "enumerate", "--n", "3")
    assert r.exit_code == 0 and r.summary.startswith("|NC_3| = 5")
    data = load(r.artifacts[0])
    assert data["version"] == __version__ and data["parameters"] == {"n": 3}


def test_act_intervals_involution(out):
    r = run(out, "act", "--row", "llll", "--matching", "(1,2),(3,4)")
    assert r.exit_code == 0 and r.summary.endswith("(1,4),(2,3)")
    r = run(out, "intervals", "--top", "rlrr", "--bottom", "llrl")
    assert r.exit_code == 0
    assert load(r.artifacts[0])["result"]["symbols"] == ">**>"
    r = run(out, "involution", "--top", "rl", "--bottom", "ll")
    assert r.exit_code == 0
    assert load(r.artifacts[0])["result"]["image"] == {"top": "ll", "bottom": "lr"}


def test_verify_involution_summary(out):
    r = run(out, "verify", "involution", "--L", "4")
    assert r.exit_code == 0
    assert r.summary.splitlines()[0] == "4^4 = 256 pairs: V∘V ✓, Pat∘V ✓, count-switch ✓, R-equivariance ✓"
    r = run(out, "verify", "involution", "--L", "10", "--samples", "300", "--seed", "1")
    assert r.exit_code == 0 and "300 random pairs" in r.summary


def test_verify_commute_and_negative_control(out):
    r = run(out, "verify", "commute", "--n", "3")
    assert r.exit_code == 0
    data = load(r.artifacts[0])["result"]
    assert data["holds"] and data["grid_check"] and data["max_abs_coefficient"] == 0
    assert run(out, "verify", "commute", "--n", "3", "--inject-defect").exit_code == 1


def test_verify_algebraic_claims(out):
    assert run(out, "verify", "yangbaxter").exit_code == 0
    r = run(out, "verify", "yangbaxter", "--p", "2/3", "--q", "1/3")
    assert r.exit_code == 0 and load(r.artifacts[0])["result"]["s"] == "8/5"
    assert run(out, "verify", "auxcompose", "--s", "2", "--t", "1/2").exit_code == 0
    assert run(out, "verify", "rowswitch", "--L", "4").exit_code == 0
    assert run(out, "verify", "rowswitch", "--L", "4", "--p", "0.3", "--q", "0.6").exit_code == 0


def test_transfer_and_stationary(out):
    r = run(out, "transfer", "--n", "2", "--eval", "1/2")
    assert r.exit_code == 0
    csv = [a for a in r.artifacts if a.endswith(".csv")][0]
    assert open(csv).read().splitlines()[1] == '"(1,2),(3,4)",7/16,9/16'
    r = run(out, "stationary", "--n", "3", "--p", "1/3")
    assert load(r.artifacts[0])["result"]["(1,2),(3,4),(5,6)"] == "2/7"


def test_simulate_is_byte_identical(out):
    a = run(out / "a", "simulate", "--L", "4", "--schedule", "constant:0.5", "--samples", "1000", "--seed", "7")
    b = run(out / "b", "simulate", "--L", "4", "--schedule", "constant:0.5", "--samples", "1000", "--seed", "7")
    assert a.exit_code == b.exit_code == 0
    assert open(a.artifacts[0], "rb").read() == open(b.artifacts[0], "rb").read()
    c = run(out / "c", "simulate", "--L", "4", "--schedule", "constant:0.5", "--samples", "1000", "--seed", "7",
            "--threads", "2")
    assert open(c.artifacts[0], "rb").read() == open(a.artifacts[0], "rb").read()


def test_invariance_command(out):
    path = out / "schedules.json"
    path.write_text(json.dumps([{"kind": "constant", "values": ["1/2"]},
                                {"kind": "cyclic", "values": ["1/5", "4/5"]}]))
    r = run(out, "invariance", "--L", "4", "--schedules", str(path), "--samples", "4000", "--seed", "3")
    assert r.exit_code == 0 and "max pairwise TV" in r.summary
    path.write_text(json.dumps([{"kind": "constant", "values": ["1"]}]))
    r = run(out, "invariance", "--L", "4", "--schedules", str(path), "--samples", "10", "--seed", "3")
    assert r.exit_code == 2 and "infinity" in r.summary


@pytest.mark.parametrize("argv", [
    ["enumerate", "--n", "0"],
    ["enumerate", "--bogus"],
    ["verify", "involution", "--L", "5"],
    ["verify", "commute", "--n", "9"],
    ["transfer", "--n", "2", "--eval", "0.1.2"],
    ["stationary", "--n", "2", "--p", "1"],
    ["act", "--row", "lr", "--matching", "(1,3),(2,4)"],
    ["simulate", "--L", "4", "--schedule", "constant:1", "--samples", "5", "--seed", "0", "--max-rows", "50"],
    ["verify", "yangbaxter", "--p", "1/2"],
])
def test_usage_and_resource_errors_exit_2(out, argv):
    assert run(out, *argv).exit_code == 2


def test_env_overrides_out(tmp_path, monkeypatch):
    monkeypatch.setenv("LOOPLAB_OUT", str(tmp_path / "env"))
    r = run_command(["enumerate", "--n", "2", "--out", str(tmp_path / "flag")])
    assert r.artifacts[0].startswith(str(tmp_path / "env"))


def test_main_and_module_entry(out, capsys):
    assert main(["enumerate", "--n", "1", "--out", str(out)]) == 0
    assert "|NC_1| = 1" in capsys.readouterr().out
    proc = subprocess.run([sys.executable, "-m", "looplab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
