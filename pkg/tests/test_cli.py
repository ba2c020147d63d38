import subprocess
import sys

import pytest

from lsap_mpc.cli import main, parse_ints, parse_seeds, UsageError


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def mfile(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("2 2\n1 2\n2 4\n")
    return p


def test_parse_helpers():
    assert parse_ints("10..50:10") == [10, 20, 30, 40, 50]
    assert parse_ints("2..4,8") == [2, 3, 4, 8]
    assert parse_seeds("3") == [0, 1, 2] and parse_seeds("5,7") == [5, 7]
    for bad in ("", "x", "1..y"):
        with pytest.raises(UsageError):
            parse_ints(bad)


def test_solve_file(mfile, capsys):
    code, out, _ = run(["solve", "--algo", "hungarian", "--data", "file", "--in", str(mfile)], capsys)
    assert code == 0 and "cost: 4" in out and "assignment: 0->1 1->0" in out and "stats:" in out


def test_solve_all_mpc(capsys):
    code, out, _ = run(["solve", "--algo", "all", "--n", "4", "--mpc", "--backend", "ideal"], capsys)
    costs = {line for line in out.splitlines() if line.startswith("cost:")}
    assert code == 0 and len(costs) == 1 and out.count("mpc: rounds=") == 5


def test_certify_prove_verify(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LSAP_MPC_OUT", str(tmp_path))
    assert run(["certify", "--n", "3", "--seeds", "4,5"], capsys)[0] == 0
    pub, wit = tmp_path / "certificate.public.json", tmp_path / "certificate.witness.json"
    assert pub.exists() and wit.exists() and "weights" not in pub.read_text()
    code, out, _ = run(["prove", "--witness", str(wit)], capsys)
    proof = tmp_path / "proof.bin"
    assert code == 0 and proof.exists() and "size check: ok" in out
    assert (tmp_path / "proof.bin.manifest").exists()
    code, out, _ = run(["verify", "--proof", str(proof), "--public", str(pub)], capsys)
    assert code == 0 and out.strip() == "accept"

    blob = bytearray(proof.read_bytes())
    blob[-3] ^= 1
    bad = tmp_path / "bad.bin"
    bad.write_bytes(bytes(blob))
    assert run(["verify", "--proof", str(bad)], capsys)[0] == 2
    bad.write_bytes(bytes(blob[:20]))
    code, out, _ = run(["verify", "--proof", str(bad)], capsys)
    assert code == 2 and "malformed" in out
    assert run(["verify", "--proof", str(tmp_path / "missing.bin")], capsys)[0] == 1


def test_verify_against_other_public_file(tmp_path, capsys):
    run(["certify", "--n", "3", "--out", str(tmp_path / "a")], capsys)
    run(["certify", "--n", "3", "--seeds", "9,9", "--out", str(tmp_path / "b")], capsys)
    run(["prove", "--witness", str(tmp_path / "a" / "certificate.witness.json"), "--out", str(tmp_path / "p.bin")], capsys)
    code, out, _ = run(["verify", "--proof", str(tmp_path / "p.bin"), "--public",
                        str(tmp_path / "b" / "certificate.public.json")], capsys)
    assert code == 2 and out.startswith("reject")


def test_bench_stdout_is_deterministic(capsys):
    args = ["bench", "--algo", "hungarian,sap_acm", "--n", "3..4", "--seeds", "2",
            "--latency", "0,5", "--no-timestamp", "--out", "-"]
    code, first, _ = run(args, capsys)
    assert code == 0
    assert run(args, capsys)[1] == first
    assert len(first.splitlines()) == 1 + 2 * 2 * 2 * 2


def test_bench_tables(tmp_path, capsys):
    code, out, _ = run(["bench", "--n", "3", "--latency", "0,10", "--countermeasure", "both",
                        "--tables", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "bench.csv").read_text().startswith("# generated")
    for name in ("runtime", "munkres", "sap", "latency", "shuffle"):
        assert (tmp_path / f"{name}.csv").exists()


def test_shuffle_demo(capsys):
    code, out, _ = run(["shuffle-demo", "--n", "4", "--draws", "2"], capsys)
    assert code == 0 and out.count("unshuffled seed=") == 2 and "distinct digests: unshuffled=1" in out


@pytest.mark.parametrize("args", [
    ["solve", "--algo", "bogus"],
    ["solve", "--data", "file"],
    ["solve", "--in", "x.txt"],
    ["bench", "--n", "a..b"],
    ["bench", "--latency", "x"],
    ["solve", "--data", "file", "--in", "/nonexistent/m.txt"],
])
def test_usage_errors(args, capsys):
    code, _, err = run(args, capsys)
    assert code == 1 and "error" in err


def test_bad_flag_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        main(["solve", "--frobnicate"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 1


def test_malformed_matrix_file(tmp_path, capsys):
    p = tmp_path / "m.txt"
    p.write_text("2 2\n1 2 3\n")
    assert run(["solve", "--data", "file", "--in", str(p)], capsys)[0] == 1


def test_malformed_witness(tmp_path, capsys):
    p = tmp_path / "w.json"
    p.write_text("{not json")
    assert run(["prove", "--witness", str(p)], capsys)[0] == 1


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "lsap_mpc.cli", "solve", "--n", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and "cost:" in r.stdout
