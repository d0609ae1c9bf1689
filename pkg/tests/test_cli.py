import json
import subprocess
import sys
from fractions import Fraction

import pytest

from commonness import cli
from commonness.cli import fixture_path

GOLDEN = {
    "quad_1_2.txt": ["quad", "--pair", "1,2", "--phi", "fixtures/paper_phi.json"],
    "deficit_1_2_n100.txt": ["deficit", "--form", "1,2,-1,-2", "--f", "const:1/2", "--n", "100"],
    "color_brute_schur_n4.json": ["color-brute", "--form", "1,1,-1", "--n", "4"],
    "matrix_1_2_n6.txt": ["matrix", "--pair", "1,2", "--n", "6"],
    "psd_1_2_n11_12.json": ["psd", "--pair", "1,2", "--n", "11:12"],
    "kernel_1_2_grid4.csv": ["kernel-eval", "--pair", "1,2", "--grid", "4"],
    "witness_1_2_n400.json": ["witness", "--pair", "1,2", "--n", "400"],
    "color_local_schur_n40_seed7.json": ["color-local", "--form", "1,1,-1", "--n", "40",
                                         "--restarts", "4", "--seed", "7"],
}


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_outputs(name, capsys, tmp_path, monkeypatch):
    # run from an unrelated directory: fixtures/ must resolve to the bundled copy
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(GOLDEN[name], capsys)
    assert code == 0
    assert out == (fixture_path("golden") / name).read_text()


def test_quad_example(capsys):
    code, out, _ = run(["quad", "--pair", "1,2", "--phi", "builtin"], capsys)
    assert (code, out) == (0, "-120959/1600000\n")


def test_color_brute_example(capsys):
    code, out, _ = run(["color-brute", "--form", "1,1,-1", "--n", "4"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 0 and len(rep["coloring"]["colors"]) == 4


def test_count_naive_and_convolution_agree(capsys, tmp_path):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"n": 5, "mode": "probability",
                             "values": [{"num": i, "den": 5} for i in range(5)]}))
    outs = []
    for method in ("naive", "convolution"):
        code, out, _ = run(["count", "--form", "1,1,-1", "--n", "5", "--f", str(f), "--method", method], capsys)
        assert code == 0
        outs.append(Fraction(out.strip()))
    assert outs[0] == outs[1]


def test_rado(capsys):
    code, out, _ = run(["rado", "--system", "1,1,-1"], capsys)
    assert code == 0 and json.loads(out)["N0"] == 5
    code, out, _ = run(["rado", "--system", "1,1,-1", "--n-max", "4"], capsys)
    assert code == 1 and json.loads(out)["found"] is False


def test_growth_and_scan(capsys, tmp_path):
    code, out, _ = run(["growth", "--form", "1,1,-1", "--n-list", "8,10,12"], capsys)
    assert code == 0 and out.splitlines()[1] == "8,3,brute"
    certs = tmp_path / "certs"
    code, out, _ = run(["scan", "--a-max", "1", "--b-max", "2", "--N", "60", "--certs-dir", str(certs)], capsys)
    assert code == 0 and out.splitlines()[1].startswith("1,2,60,-")
    assert (certs / "phi_1_2.json").exists()


def test_eig_search_writes_phi(capsys, tmp_path):
    out_path = tmp_path / "phi.json"
    code, out, _ = run(["eig-search", "--pair", "1,2", "--N", "100", "--denom", "100",
                        "--out", str(out_path)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["lambda_min"] < 0 and Fraction(rep["value"]) < 0
    code, out, _ = run(["quad", "--pair", "1,2", "--phi", str(out_path)], capsys)
    assert Fraction(out.strip()) == Fraction(rep["value"])


@pytest.mark.parametrize("argv", [
    ["quad", "--pair", "2,4", "--phi", "builtin"],
    ["quad", "--pair", "1,2", "--phi", "missing.json"],
    ["deficit", "--form", "1", "--f", "const:1/2", "--n", "3"],
    ["deficit", "--form", "1,1,-1", "--f", "const:3/2", "--n", "3"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2


def test_budget_exceeded_exit_3(capsys):
    code, _, err = run(["color-brute", "--form", "1,1,-1", "--n", "30", "--budget", "100"], capsys)
    assert code == 3 and "budget" in err


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "commonness.cli", "deficit", "--form", "1,2,-1,-2",
                           "--f", "const:1/2", "--n", "100"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0\n"


def test_verify_paper(capsys):
    code, out, _ = run(["verify-paper"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 4
    assert all(line.startswith("[PASS]") for line in lines)
