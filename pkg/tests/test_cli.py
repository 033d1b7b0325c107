import json
import subprocess
import sys

import pytest

from linchow.cli import main


def test_enumerate3_file(tmp_path, capsys):
    out = tmp_path / "c.txt"
    assert main(["enumerate3", "--p", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# p=2 degree=3") and len(lines) == 9
    assert "8 cycles written" in capsys.readouterr().out


def test_enumerate3_p11(tmp_path):
    out = tmp_path / "c11.txt"
    assert main(["enumerate3", "--p", "11", "--threads", "4", "--out", str(out)]) == 0
    with open(out) as fh:
        n = sum(1 for _ in fh) - 1
    # the reference figure is 530496; see the acceptance suite
    assert n == 608768


def test_enumerate4_stdout(capsys):
    assert main(["enumerate4", "--p", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 1984
    assert main(["enumerate4", "--p", "2", "--keep-empty-boundary"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 1 + 2496


def test_boundaries(capsys):
    assert main(["boundaries", "--p", "5", "--degree", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 2121
    assert "0,2,0,1|1,4,1,1\t+1*(2,4;3;2) -1*(4,2;3;6)" in out
    assert main(["boundaries", "--p", "2"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 1 + 2496


def test_kernel(capsys):
    assert main(["kernel", "--p", "3", "--scheme", "product"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "kernel_rank=63" in out[0] and len(out) == 64


def test_homology_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["homology", "--p", "2", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["counts"]["cycles3"] == 8 and rep["image"] == {"free_rank": 0, "invariant_factors": [3]}
    assert "report written" in capsys.readouterr().out


def test_homology_text_stage_limit(capsys):
    assert main(["homology", "--p", "5", "--stage-limit", "enumerate3", "--format", "text"]) == 0
    assert "C^2(F_5,3): 2120" in capsys.readouterr().out


def test_homology_swap_policy(capsys):
    assert main(["homology", "--p", "2", "--swap-policy", "vanishing-only"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["rewrites"]["applied"]["swap_with_correction"] == 8


def test_snf(tmp_path, capsys):
    m = tmp_path / "id3.txt"
    m.write_text("3 3 3\n0 0 1\n1 1 1\n2 2 1\n")
    assert main(["snf", "--matrix", str(m)]) == 0
    assert capsys.readouterr().out.strip() == "[1, 1, 1]"
    m.write_text("2 2 2\n0 0 2\n1 1 4\n")
    assert main(["snf", "--matrix", str(m)]) == 0
    assert capsys.readouterr().out.strip() == "[2, 4]"


def test_verify(capsys):
    assert main(["verify", "--p", "2", "--samples", "50"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 6


@pytest.mark.parametrize("argv", [
    ["enumerate3", "--p", "4"],
    ["enumerate3", "--p", "37"],
    ["enumerate3"],
    ["frobnicate"],
    ["homology", "--p", "3", "--threads", "0"],
    ["homology", "--p", "3", "--stage-limit", "everything"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_compute_error_missing_matrix(tmp_path, capsys):
    assert main(["snf", "--matrix", str(tmp_path / "none.txt")]) == 1
    assert "error" in capsys.readouterr().err


def test_compute_error_bad_checkpoint(tmp_path, capsys):
    ck = tmp_path / "ck"
    ck.mkdir()
    (ck / "manifest.json").write_text("{}")
    assert main(["homology", "--p", "2", "--checkpoint-dir", str(ck)]) == 1
    err = capsys.readouterr().err
    assert "refusing to resume" in err and str(ck) in err


def test_env_defaults(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LINCHOW_THREADS", "zero")
    assert main(["enumerate3", "--p", "2"]) == 2
    monkeypatch.setenv("LINCHOW_THREADS", "2")
    monkeypatch.setenv("LINCHOW_CHECKPOINT_DIR", str(tmp_path / "ck"))
    assert main(["homology", "--p", "2", "--stage-limit", "enumerate4"]) == 0
    assert (tmp_path / "ck" / "manifest.json").exists()


def test_help_and_module_entry():
    assert main(["--help"]) == 0
    r = subprocess.run([sys.executable, "-m", "linchow", "snf"], capture_output=True, text=True)
    assert r.returncode == 2
