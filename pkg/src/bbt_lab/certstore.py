"""Certificate files: JSON-lines persistence, mandatory re-verification and audit.

File layout, one JSON object per line::

    {"count": K, "format_version": 1, "n": n, "producer": "..."}
    {"elapsed_ms": null, "fid": "0x...", "margin_min": m, "mask": [...], "n": n, ...}
    ...
    {"truncated": true, "written": j}        # only if the writer was interrupted

Records are sorted by fid so identical certificate sets give identical bytes.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boolean_core import apply_hadamard, fids_to_tables, format_fid
from .minsupport import Certificate
from .synthesis import TernaryMask, verify

FORMAT_VERSION = 1
PRODUCER = "bbt_lab"
_FIELDS = ("fid", "n", "mask", "support", "margin_min", "optimal", "solver", "elapsed_ms")


class CorruptRecord(ValueError):
    def __init__(self, msg: str, fid: str | None = None, line: int | None = None):
        self.fid, self.line = fid, line
        where = f" (fid {fid})" if fid else ""
        where += f" at line {line}" if line is not None else ""
        super().__init__(msg + where)


class VerificationFailed(ValueError):
    def __init__(self, fid: str, reason: str):
        self.fid, self.reason = fid, reason
        super().__init__(f"certificate for fid {fid} failed verification: {reason}")


class UnsupportedFormat(ValueError):
    pass


def data_dir() -> Path:
    """Default output root: ``$BBT_LAB_DATA_DIR`` or ``./bbt_lab_data``."""
    return Path(os.environ.get("BBT_LAB_DATA_DIR", "bbt_lab_data"))


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def certificate_record(c: Certificate, timings: bool = False) -> dict:
    return {
        "fid": format_fid(c.fid, c.n),
        "n": c.n,
        "mask": c.mask.tolist(),
        "support": c.min_support,
        "margin_min": c.margin_min,
        "optimal": c.optimal,
        "solver": c.solver,
        # wall time breaks byte-reproducibility, so it is opt-in
        "elapsed_ms": round(c.elapsed * 1000, 3) if timings else None,
    }


def header(n: int, count: int, producer: str | None = None) -> dict:
    from . import __version__
    return {"format_version": FORMAT_VERSION, "n": n, "count": count,
            "producer": producer or f"{PRODUCER} {__version__}"}


def dumps(certs, n: int | None = None, producer: str | None = None,
          timings: bool = False) -> str:
    certs = sorted(certs, key=lambda c: c.fid)
    if n is None:
        if not certs:
            raise ValueError("n is required for an empty certificate file")
        n = certs[0].n
    lines = [_dumps(header(n, len(certs), producer))]
    lines += [_dumps(certificate_record(c, timings)) for c in certs]
    return "\n".join(lines) + "\n"


def save(certs, path, n: int | None = None, producer: str | None = None,
         timings: bool = False, force: bool = True) -> Path:
    path = Path(path)
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists; pass force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(certs, n, producer, timings))
    return path


class CertificateWriter:
    """Streaming writer that leaves a truncation marker if interrupted.

    Records must arrive in ascending fid order.
    """

    def __init__(self, path, n: int, count: int, producer: str | None = None,
                 timings: bool = False):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.n, self.count, self.timings = n, count, timings
        self.written = 0
        self._last = -1
        self._fh = open(self.path, "w")
        self._fh.write(_dumps(header(n, count, producer)) + "\n")

    def write(self, c: Certificate) -> None:
        if c.fid <= self._last:
            raise ValueError("certificates must be written in ascending fid order")
        self._last = c.fid
        self._fh.write(_dumps(certificate_record(c, self.timings)) + "\n")
        self.written += 1

    def close(self, truncated: bool = False) -> None:
        if self._fh.closed:
            return
        if truncated or self.written != self.count:
            self._fh.write(_dumps({"truncated": True, "written": self.written}) + "\n")
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close(truncated=exc_type is not None)
        return False


@dataclass
class CertificateSet:
    header: dict
    certificates: list[Certificate]
    truncated: bool = False

    @property
    def n(self) -> int:
        return int(self.header["n"])

    def __len__(self):
        return len(self.certificates)

    def __iter__(self):
        return iter(self.certificates)


def _parse_header(line: str, source) -> dict:
    try:
        head = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptRecord(f"{source}: unreadable header", line=1) from exc
    if not isinstance(head, dict) or "format_version" not in head:
        raise CorruptRecord(f"{source}: missing header", line=1)
    if head["format_version"] != FORMAT_VERSION:
        raise UnsupportedFormat(f"{source}: unsupported format_version {head['format_version']!r}")
    for key in ("n", "count", "producer"):
        if key not in head:
            raise CorruptRecord(f"{source}: header lacks {key!r}", line=1)
    return head


def _parse_record(rec: dict, n: int, lineno: int) -> Certificate:
    fid_s = rec.get("fid") if isinstance(rec.get("fid"), str) else None
    missing = [k for k in _FIELDS if k not in rec]
    if missing:
        raise CorruptRecord(f"record lacks {missing}", fid_s, lineno)
    try:
        fid = int(rec["fid"], 16)
    except (TypeError, ValueError) as exc:
        raise CorruptRecord("fid is not a hex string", fid_s, lineno) from exc
    if rec["n"] != n:
        raise CorruptRecord(f"record n={rec['n']} in a file for n={n}", fid_s, lineno)
    N = 1 << n
    if not 0 <= fid < (1 << N):
        raise CorruptRecord("fid out of range", fid_s, lineno)
    w = rec["mask"]
    if not isinstance(w, list) or len(w) != N:
        raise CorruptRecord(f"mask must be a list of {N} entries", fid_s, lineno)
    if any(type(x) is not int or x not in (-1, 0, 1) for x in w):
        raise CorruptRecord("mask has a non-ternary entry", fid_s, lineno)
    mask = TernaryMask(n, np.array(w, dtype=np.int8))
    if rec["support"] != mask.support:
        raise CorruptRecord(f"support {rec['support']} but mask has {mask.support} nonzeros",
                            fid_s, lineno)
    ms = rec["elapsed_ms"]
    return Certificate(fid, n, mask, mask.support, rec["margin_min"], bool(rec["optimal"]),
                       str(rec["solver"]), 0.0 if ms is None else ms / 1000.0)


def loads(text: str, source="<string>") -> CertificateSet:
    """Parse and re-verify every record; the first failure aborts with its fid."""
    lines = text.splitlines()
    if not lines:
        raise CorruptRecord(f"{source}: empty file")
    head = _parse_header(lines[0], source)
    n = int(head["n"])
    certs = []
    truncated = False
    last = -1
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptRecord(f"{source}: unreadable record", line=lineno) from exc
        if rec.get("truncated"):
            truncated = True
            if rec.get("written") != len(certs):
                raise CorruptRecord(f"{source}: truncation marker disagrees with body",
                                    line=lineno)
            break
        c = _parse_record(rec, n, lineno)
        if c.fid <= last:
            raise CorruptRecord("records are not in strictly ascending fid order",
                                rec["fid"], lineno)
        last = c.fid
        chk = verify(c.mask, c.truth_table)
        if not chk.ok:
            raise VerificationFailed(rec["fid"], f"sign check fails (min margin {chk.margin})")
        if chk.margin != c.margin_min:
            raise VerificationFailed(rec["fid"],
                                     f"stored margin {c.margin_min} but recomputed {chk.margin}")
        certs.append(c)
    if not truncated and len(certs) != head["count"]:
        raise CorruptRecord(f"{source}: header count {head['count']} but {len(certs)} records")
    return CertificateSet(head, certs, truncated)


def load(path) -> CertificateSet:
    return loads(Path(path).read_text(), source=str(path))


# ---------------------------------------------------------------------------
# standalone audit


@dataclass
class AuditReport:
    records: int = 0
    passed: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)  # (fid, reason)
    int_ops: int = 0           # butterfly add/sub plus sign comparisons actually performed
    dense_ops: int = 0         # multiplies a dense H_n @ w evaluation would need
    elapsed: float = 0.0
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures


def audit(path_or_text, is_text: bool = False) -> AuditReport:
    """Independent re-check using only :func:`apply_hadamard` on the stored masks.

    Stored margins and supports are ignored; malformed records become failures
    instead of exceptions.
    """
    t0 = time.perf_counter()
    text = path_or_text if is_text else Path(path_or_text).read_text()
    rep = AuditReport()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return rep
    try:
        n = int(json.loads(lines[0])["n"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        rep.failures.append(("<header>", "unreadable header"))
        return rep
    N = 1 << n
    fids, masks, labels = [], [], []
    for line in lines[1:]:
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            rep.records += 1
            rep.failures.append(("<unparsed>", "unreadable record"))
            continue
        if rec.get("truncated"):
            rep.truncated = True
            break
        rep.records += 1
        label = str(rec.get("fid"))
        try:
            fid = int(rec["fid"], 16)
            w = np.array(rec["mask"], dtype=np.int64)
            if w.shape != (N,) or not np.all(np.isin(w, (-1, 0, 1))) or not 0 <= fid < (1 << N):
                raise ValueError
        except (KeyError, TypeError, ValueError):
            rep.failures.append((label, "malformed record"))
            continue
        fids.append(fid)
        masks.append(w)
        labels.append(label)
    if masks:
        W = np.stack(masks)
        Y = apply_hadamard(W)
        F = fids_to_tables(fids, n).astype(np.int64)
        ok = np.all(F * Y >= 1, axis=1)
        for good, label in zip(ok, labels):
            if good:
                rep.passed += 1
            else:
                rep.failures.append((label, "sign check fails"))
        rep.int_ops = len(masks) * (N * n + N)
        rep.dense_ops = len(masks) * N * N
    rep.elapsed = time.perf_counter() - t0
    return rep
