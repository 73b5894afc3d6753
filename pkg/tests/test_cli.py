import json

import pytest

from bbt_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1]), out


@pytest.fixture(autouse=True)
def data_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("BBT_LAB_DATA_DIR", str(tmp_path / "data"))
    return tmp_path / "data"


def test_analyze_majority(capsys):
    code, summary, out = run(capsys, "analyze", "--n", "3", "--family", "majority")
    assert code == 0 and summary["log2_mu"] == "-1/1" and summary["bounds_ok"]
    report = json.loads("\n".join(out[:-1]))
    assert report["log2_mu_2dp"] == "-1.00"


def test_analyze_constant_and_parity(capsys):
    code, summary, _ = run(capsys, "analyze", "--n", "4", "--fid", "0x0000")
    assert code == 0 and summary["log2_mu"] == "0/1"
    code, _, out = run(capsys, "analyze", "--n", "2", "--fid", "0x6")
    assert json.loads("\n".join(out[:-1]))["spectrum"] == [0, 0, 0, 4]


def test_usage_errors(capsys):
    code, summary, _ = run(capsys, "analyze", "--n", "3")
    assert code == 2 and "error" in summary
    code, _, _ = run(capsys, "minsupport", "--n", "3", "--sample", "4")
    assert code == 2
    code, _, _ = run(capsys, "analyze", "--n", "3", "--family", "majority:x")
    assert code == 2
    with pytest.raises(SystemExit) as ei:
        main(["nonsense"])
    assert ei.value.code == 2


def test_npn_and_overwrite_guard(capsys, data_dir):
    code, summary, out = run(capsys, "npn", "--n", "4")
    assert code == 0 and summary["classes"] == 222 and "222 classes" in out
    code, _, _ = run(capsys, "npn", "--n", "4")
    assert code == 2
    code, _, _ = run(capsys, "npn", "--n", "4", "--force")
    assert code == 0


def test_minsupport_verify_correlate(capsys, data_dir):
    code, summary, _ = run(capsys, "minsupport", "--n", "3", "--all")
    assert code == 0 and summary["histogram"] == {"1": 16, "3": 112, "5": 128}
    certs = data_dir / "certs_n3.jsonl"
    code, summary, _ = run(capsys, "verify", "--certs", str(certs))
    assert code == 0 and summary["passed"] == 256
    code, summary, _ = run(capsys, "correlate", "--certs", str(certs))
    assert code == 0 and summary["size"] == 256
    assert (data_dir / "correlate_n3" / "conditional.csv").exists()


def test_minsupport_budget_exit(capsys):
    code, summary, _ = run(capsys, "minsupport", "--n", "5", "--fid", "0x1e3a5b7c",
                           "--budget-nodes", "50")
    assert code == 4 and summary["exhausted"] == 1


def test_verify_detects_tampering(capsys, data_dir):
    run(capsys, "minsupport", "--n", "3", "--all")
    certs = data_dir / "certs_n3.jsonl"
    lines = certs.read_text().splitlines()
    rec = json.loads(lines[9])
    rec["mask"] = [0] * 8
    lines[9] = json.dumps(rec)
    certs.write_text("\n".join(lines) + "\n")
    code, summary, _ = run(capsys, "verify", "--certs", str(certs))
    assert code == 3 and summary["failed_fids"] == [rec["fid"]]
    code, summary, _ = run(capsys, "correlate", "--certs", str(certs))
    assert code == 3 and summary["fid"] == rec["fid"]


def test_census_and_synth(capsys, data_dir):
    code, summary, _ = run(capsys, "census", "--n", "3", "--scaling")
    assert code == 0 and summary["degree_histogram"]["35"] == 96
    assert (data_dir / "census_n3" / "scaling.csv").exists()
    code, summary, _ = run(capsys, "synth", "--n", "3", "--all", "--certs",
                           str(data_dir / "s3.jsonl"))
    assert code == 0 and summary["successes"] == 256
    code, summary, _ = run(capsys, "verify", "--certs", str(data_dir / "s3.jsonl"))
    assert code == 0 and summary["passed"] == 256


def test_threads_do_not_change_outputs(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run(capsys, "minsupport", "--n", "3", "--sample", "40", "--seed", "5", "--certs", str(a))
    run(capsys, "minsupport", "--n", "3", "--sample", "40", "--seed", "5", "--certs", str(b),
        "--threads", "4")
    assert a.read_bytes() == b.read_bytes()
