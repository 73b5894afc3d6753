import json

import pytest

from bbt_lab import certstore as cs


@pytest.fixture
def n3_file(tmp_path, n3_census):
    return cs.save(n3_census.certificates, tmp_path / "n3.jsonl", n=3)


def _mutate(path, index, fn):
    lines = path.read_text().splitlines()
    rec = json.loads(lines[index])
    fn(rec)
    lines[index] = json.dumps(rec, sort_keys=True, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n")
    return rec["fid"]


def test_round_trip_is_byte_identical(tmp_path, n3_file, n3_census):
    loaded = cs.load(n3_file)
    assert len(loaded) == 256 and not loaded.truncated
    assert loaded.certificates == sorted(n3_census.certificates, key=lambda c: c.fid)
    again = cs.save(loaded.certificates, tmp_path / "again.jsonl", n=3)
    assert again.read_bytes() == n3_file.read_bytes()


def test_header_and_record_layout(n3_file):
    lines = n3_file.read_text().splitlines()
    head = json.loads(lines[0])
    assert head["format_version"] == 1 and head["n"] == 3 and head["count"] == 256
    rec = json.loads(lines[1])
    assert set(rec) == {"fid", "n", "mask", "support", "margin_min", "optimal", "solver",
                        "elapsed_ms"}
    assert rec["fid"] == "0x00" and rec["elapsed_ms"] is None


def test_non_ternary_entry_is_corrupt(n3_file):
    fid = _mutate(n3_file, 5, lambda r: r["mask"].__setitem__(0, 2))
    with pytest.raises(cs.CorruptRecord) as ei:
        cs.load(n3_file)
    assert ei.value.fid == fid


def test_sign_failure_names_fid(n3_file):
    def flip(rec):
        i = next(k for k, x in enumerate(rec["mask"]) if x)
        rec["mask"][i] = -rec["mask"][i]
    fid = _mutate(n3_file, 40, flip)
    with pytest.raises(cs.VerificationFailed) as ei:
        cs.load(n3_file)
    assert ei.value.fid == fid and fid in str(ei.value)


def test_margin_tamper_detected(n3_file):
    _mutate(n3_file, 7, lambda r: r.__setitem__("margin_min", r["margin_min"] + 2))
    with pytest.raises(cs.VerificationFailed):
        cs.load(n3_file)


def test_count_mismatch_and_version(tmp_path, n3_file):
    lines = n3_file.read_text().splitlines()
    (tmp_path / "short.jsonl").write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(cs.CorruptRecord):
        cs.load(tmp_path / "short.jsonl")
    head = json.loads(lines[0])
    head["format_version"] = 99
    (tmp_path / "v99.jsonl").write_text(json.dumps(head) + "\n")
    with pytest.raises(cs.UnsupportedFormat):
        cs.load(tmp_path / "v99.jsonl")


def test_truncation_marker(tmp_path, n3_census):
    certs = sorted(n3_census.certificates, key=lambda c: c.fid)
    path = tmp_path / "partial.jsonl"
    with pytest.raises(KeyboardInterrupt):
        with cs.CertificateWriter(path, 3, 256) as w:
            for c in certs[:10]:
                w.write(c)
            raise KeyboardInterrupt
    loaded = cs.load(path)
    assert loaded.truncated and len(loaded) == 10
    rep = cs.audit(path)
    assert rep.truncated and rep.passed == 10


def test_audit(n3_file):
    rep = cs.audit(n3_file)
    assert rep.ok and rep.records == rep.passed == 256
    assert rep.dense_ops == 256 * 64
    fid = _mutate(n3_file, 100, lambda r: r.__setitem__("mask", [0] * 8))
    rep = cs.audit(n3_file)
    assert [f for f, _ in rep.failures] == [fid]


def test_audit_empty():
    rep = cs.audit("", is_text=True)
    assert rep.ok and rep.records == 0
