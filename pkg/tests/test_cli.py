import json
import subprocess
import sys

import pytest

from parhyp.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_example(capsys):
    code, out, err = run_cli(capsys, "solve", "-p", "5", "example-k1n3.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verified"] is True
    assert doc["A"] == [2, 2, 2] and doc["q"] == [0] and doc["l"] == [1]
    assert sorted(doc["solution"]) == ["1", "2", "3"]
    for terms in doc["solution"].values():
        assert all(sum(t["exp"]) <= 12 for t in terms)
    assert doc["solution"]["1"] == [{"coeff": 1, "exp": [1, 0, 0]}, {"coeff": 2, "exp": [0, 1, 0]},
                                    {"coeff": 2, "exp": [0, 0, 1]}]
    assert "verified: True" in err


def test_output_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["solve", "-p", "7", "example-k2n5", "--q", "1,2", "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run_cli(capsys, "solve", "-p", "7", "example-k2n5", "--q", "1,2")
    assert out == a.read_text()


def test_good_prime_certificate(capsys):
    code, out, err = run_cli(capsys, "good-prime", "-p", "2", "example-k2n4.json")
    assert code == 2
    assert json.loads(out)["certificate"] == [3, 4]
    code, out, _ = run_cli(capsys, "good-prime", "-p", "5", "example-k2n4.json")
    assert code == 0 and json.loads(out) == {"good": True, "p": 5}


def test_bad_prime_blocks_computation(capsys):
    code, out, err = run_cli(capsys, "solve", "-p", "2", "example-k2n4")
    assert code == 2
    assert json.loads(out)["certificate"]["certificate"] == [3, 4]
    assert "not a good prime" in err


def test_solve_then_verify(capsys, tmp_path):
    path = tmp_path / "sol.json"
    assert main(["solve", "-p", "7", "example-k2n5", "-o", str(path)]) == 0
    code, out, _ = run_cli(capsys, "verify", "-p", "7", "example-k2n5", "--solution", str(path))
    assert code == 0 and json.loads(out)["verified"] is True
    doc = json.loads(path.read_text())
    doc["solution"]["1,2"][0]["coeff"] += 1
    path.write_text(json.dumps(doc))
    code, out, err = run_cli(capsys, "verify", "-p", "7", "example-k2n5", "--solution", str(path))
    assert code == 1
    assert json.loads(out)["verified"] is False
    assert "FAILED" in err
    code, _, _ = run_cli(capsys, "verify", "-p", "7", "example-k2n5", "--solution", str(path),
                         "--mode", "sampled", "--seed", "4")
    assert code == 1


def test_verify_reads_stdin(monkeypatch, capsys, tmp_path):
    import io
    path = tmp_path / "sol.json"
    main(["solve", "-p", "5", "example-k1n3", "-o", str(path)])
    monkeypatch.setattr("sys.stdin", io.StringIO(path.read_text()))
    code, out, _ = run_cli(capsys, "verify", "-p", "5", "-i", "example-k1n3", "--solution", "-")
    assert code == 0


def test_circuits(capsys):
    code, out, _ = run_cli(capsys, "circuits", "example-k2n4", "-p", "5")
    doc = json.loads(out)
    assert code == 0
    assert doc["circuits"][0] == {"indices": [1, 2, 3], "lambda": [1, 1, -1]}
    assert doc["good_prime"] == {"good": True, "p": 5}


def test_hamiltonian(capsys):
    code, out, _ = run_cli(capsys, "hamiltonian", "-p", "7", "example-k1n3", "--x", "0,1,3")
    doc = json.loads(out)
    assert code == 0 and doc["basis"] == ["1", "2", "3"] and doc["symmetric"]
    assert set(doc["hamiltonians"]) == {"K1", "K2", "K3"}
    code, out, err = run_cli(capsys, "hamiltonian", "-p", "7", "example-k1n3", "--x", "0,0,3")
    assert code == 2 and out == ""


def test_count(capsys):
    code, out, _ = run_cli(capsys, "count", "-p", "7", "example-k1n3", "--x", "0,1,3")
    doc = json.loads(out)
    assert code == 0 and doc["match"] is True
    assert doc["points"] == 11
    assert {k: (-v) % 7 for k, v in doc["solution_values"].items()} == doc["integrals"]
    code, out, _ = run_cli(capsys, "count", "-p", "13", "example-kappa3", "--x", "1,5,7")
    doc = json.loads(out)
    assert code == 0 and doc["match"] and doc["intermediate_sums"] == {"1": {}}


def test_count_hypothesis_violation(capsys):
    code, out, err = run_cli(capsys, "count", "-p", "5", "example-kappa3", "--x", "0,1,3")
    assert code == 2 and "divide" in err


def test_count_kappa_override(capsys):
    # kappa = 3 on the all -1 family breaks the weight hypothesis
    code, _, err = run_cli(capsys, "count", "-p", "7", "example-k1n3", "--x", "0,1,3", "--kappa", "3")
    assert code == 2 and "weights" in err


def test_bethe(capsys):
    code, out, _ = run_cli(capsys, "bethe", "-p", "7", "example-k1n3", "--x", "0,1,3")
    doc = json.loads(out)
    assert code == 0 and doc["orthogonality"] == "pass"
    assert doc["solutions"][0]["t0"] == [1]
    assert doc["solutions"][0]["vector"] == {"1": 1, "2": 4, "3": 2}
    assert len(doc["self_pairings"]) == len(doc["solutions"])


@pytest.mark.parametrize("argv,msg", [
    (["solve", "-p", "6", "example-k1n3"], "not a prime"),
    (["solve", "-p", "5", "nosuch.json"], "no such file"),
    (["solve", "-p", "5", "example-k1n3", "--q", "1,2"], "--q has 2 entries"),
    (["solve", "example-k1n3"], "needs -p"),
    (["bethe", "-p", "5", "example-k1n3"], "needs --x"),
    (["verify", "-p", "5", "example-k1n3"], "needs --solution"),
])
def test_usage_errors(capsys, argv, msg):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2 and msg in err


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"b": [[1]], "a": [1]}')
    code, _, err = run_cli(capsys, "circuits", str(bad))
    assert code == 2 and "kappa" in err


def test_argparse_errors():
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["solve", "-p", "5", "example-k1n3", "--x", "a,b"])
    assert info.value.code == 2


def test_selftest_small_prime_notes(capsys):
    code, out, err = run_cli(capsys, "selftest", "-p", "3")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    notes = [n for c in doc["criteria"] for n in c["notes"]]
    assert any("p must exceed 3" in n for n in notes)
    assert err.count("[PASS]") == 8


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "parhyp.cli", "good-prime", "-p", "2",
                           "example-k2n4"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["certificate"] == [3, 4]
