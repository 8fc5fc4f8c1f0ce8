import json
import subprocess
import sys

import pytest

from apfree import cli
from apfree.seqio import read_sequence


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


@pytest.fixture
def cache(tmp_path):
    return str(tmp_path / "cache")


def test_gen_json(capsys, cache):
    code, out, _ = run(capsys, "gen", "--p", "3", "--count", "8", "--cache-dir", cache)
    assert code == 0
    assert json.loads(out)["terms"] == [1, 2, 4, 5, 10, 11, 13, 14]


def test_gen_limit_and_csv(capsys):
    code, out, _ = run(capsys, "gen", "--p", "4", "--limit", "10", "--format", "csv")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "n,term,mu_partial"
    assert [int(r.split(",")[1]) for r in rows[1:]] == [1, 2, 3, 5, 6, 8, 9, 10]


def test_gen_round_trip_through_verify_and_mu(capsys, tmp_path, cache):
    f = tmp_path / "s3.txt"
    code, out, _ = run(capsys, "gen", "--p", "3", "--count", "50", "--with-mu",
                       "--out", str(f), "--cache-dir", cache)
    assert code == 0
    gen_mu = json.loads(out)["mu_exact"]
    s, p = read_sequence(f)
    assert p == 3 and len(s) == 50
    code, out, _ = run(capsys, "verify", "--file", str(f))
    assert code == 0 and json.loads(out)["ap_free"] is True
    code, out, _ = run(capsys, "mu", "--file", str(f))
    assert code == 0 and json.loads(out)["mu_exact"] == gen_mu


def test_gen_is_deterministic_and_cache_independent(capsys, tmp_path):
    a = run(capsys, "gen", "--p", "5", "--count", "40", "--cache-dir", str(tmp_path / "a"))[1]
    b = run(capsys, "gen", "--p", "5", "--count", "40", "--cache-dir", str(tmp_path / "a"))[1]
    c = run(capsys, "gen", "--p", "5", "--count", "40", "--cache-dir", str(tmp_path / "b"))[1]
    assert a == b == c


def test_verify_reports_witness(capsys, tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("p=3\n1\n2\n3\n")
    code, out, _ = run(capsys, "verify", "--file", str(f))
    assert code == 1
    assert json.loads(out)["witness"] == {"start": 1, "diff": 1, "length": 3}


def test_mu_example(capsys, tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("1\n2\n4\n")
    code, out, _ = run(capsys, "mu", "--file", str(f))
    assert code == 0 and json.loads(out)["mu_exact"] == "7/4"


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "gen", "--p", "2", "--count", "3")[0] == 2
    assert run(capsys, "gen", "--p", "3")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["nonsense"])
    assert exc.value.code == 2
    assert run(capsys, "mu", "--file", str(tmp_path / "missing.txt"))[0] == 3
    f = tmp_path / "bad.txt"
    f.write_text("1\n5\n3\n")
    code, _, err = run(capsys, "mu", "--file", str(f))
    assert code == 1 and ":3:" in err


def test_amplify(capsys, tmp_path):
    a = tmp_path / "a.txt"
    a.write_text("p=3\n1\n")
    e = tmp_path / "e.txt"
    e.write_text("1\n2\n4\n5\n10\n")
    out_file = tmp_path / "r.txt"
    code, out, _ = run(capsys, "amplify", "--file", str(a), "--amplifier", str(e), "--out", str(out_file))
    assert code == 0
    rep = json.loads(out)
    assert rep["result"] == [1, 2, 4, 8, 10, 20]
    assert rep["mu_result"] == "81/40"
    assert read_sequence(out_file)[0].elements == (1, 2, 4, 8, 10, 20)


def test_amplify_infeasible(capsys, tmp_path):
    a = tmp_path / "a.txt"
    a.write_text("p=3\n1\n1000\n")
    code, out, _ = run(capsys, "amplify", "--file", str(a), "--budget", "1e3")
    assert code == 1 and json.loads(out)["error"] == "AmplifierInfeasible"


def test_partition(capsys, tmp_path):
    r = tmp_path / "r.txt"
    r.write_text("p=3\n20\n21\n23\n40\n41\n80\n")
    a1 = tmp_path / "a1.txt"
    a1.write_text("1\n2\n")
    code, out, _ = run(capsys, "partition", "--file", str(r), "--m", "10", "--a1", str(a1))
    assert code == 0
    obj = json.loads(out)
    assert obj["pigeonhole_j"] == 1
    assert obj["joined"] == [1, 2, 20, 21, 23, 80]


def test_partition_instances(capsys):
    code, out, _ = run(capsys, "partition", "--instances", "50", "--seed", "3")
    assert code == 0
    obj = json.loads(out)
    assert obj["passed"] and obj["claim_violations"] == 0 and obj["instances"] == 50


def test_search(capsys):
    code, out, _ = run(capsys, "search", "--n", "5", "--p", "3")
    obj = json.loads(out)
    assert code == 0 and obj["best_set"] == [1, 2, 4, 5] and obj["best_mu"] == "39/20"
    code, out, _ = run(capsys, "search", "--n", "12", "--p", "3", "--method", "exhaustive", "--compare")
    assert code == 0 and "greedy_is_optimal" in json.loads(out)


def test_bootstrap(capsys):
    code, out, _ = run(capsys, "bootstrap", "--p", "3", "--steps", "3", "--budget", "10**7")
    assert code == 0
    obj = json.loads(out)
    assert obj["status"] == "budget_exhausted"
    assert obj["harmonic_ceiling"]["budget"] == 10**7


def test_converge_manifest(capsys, tmp_path):
    terms = [1, 2, 4, 5, 10, 11, 13, 14, 28, 29]
    (tmp_path / "limit.txt").write_text("\n".join(map(str, terms)) + "\n")
    names = []
    for n in range(1, 11):
        name = f"m{n}.txt"
        (tmp_path / name).write_text("".join(f"{x}\n" for x in terms[:n]))
        names.append(name)
    man = tmp_path / "manifest.json"
    man.write_text(json.dumps({"limit": "limit.txt", "members": names, "p": 3}))
    code, out, _ = run(capsys, "converge", "--file", str(man), "--window", "14",
                       "--epsilon", "1/2")
    obj = json.loads(out)
    assert code == 0
    assert obj["convergence_index"] == 8
    assert obj["closedness"]["passed"]
    assert obj["continuity"]["within_epsilon"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "apfree", "gen", "--p", "3", "--limit", "14",
                           "--format", "text"], capture_output=True, text=True, check=True)
    assert proc.stdout.split() == ["p=3", "1", "2", "4", "5", "10", "11", "13", "14"]
