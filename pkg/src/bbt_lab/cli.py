"""Command-line entry point: ``bbt-lab <subcommand> [flags]``.

Every subcommand prints human-readable lines, heartbeats go to stderr, and the
last line on stdout is always a JSON summary.  Exit codes: 0 success, 2 usage,
3 verification failure, 4 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from . import analytics, certstore, families, npn
from .boolean_core import TruthTable, format_fid, fwht
from .influence import influences
from .invariant import BoundViolation, check_bounds, contraction_profile
from .minsupport import Budget, BudgetExhausted, SupportCensus, min_support_exact
from .synthesis import DEFAULT_TAU, dumps_records, synthesize

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_BUDGET, EXIT_INTERRUPTED = 0, 2, 3, 4, 130
HEARTBEAT_SECS = 5.0


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    fid: int | None = None
    family: str | None = None
    all: bool = False
    sample: int | None = None
    seed: int | None = None
    mode: str = "uniform"
    tau: float = DEFAULT_TAU
    heuristic_only: bool = False
    budget_nodes: int | None = None
    budget_secs: float | None = None
    certs: str | None = None
    out: str | None = None
    threads: int = 1
    force: bool = False
    timings: bool = False
    scaling: bool = False

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> RunConfig:
        cfg = cls(**{k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__})
        if cfg.sample is not None and cfg.seed is None:
            raise UsageError("--sample requires --seed")
        if cfg.threads < 1:
            raise UsageError("--threads must be >= 1")
        return cfg


def _fid(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer fid: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--fid", type=_fid, help="function id, hex (0x..) or decimal")
    common.add_argument("--family", help="parity | majority | dictator[:k] | and | or | tribes")
    common.add_argument("--all", action="store_true", help="every function on n variables")
    common.add_argument("--sample", type=int, metavar="N")
    common.add_argument("--seed", type=int)
    common.add_argument("--mode", choices=("uniform", "npn"), default="uniform",
                        help="sampling mode for --sample")
    common.add_argument("--tau", type=float, default=DEFAULT_TAU)
    common.add_argument("--heuristic-only", action="store_true")
    common.add_argument("--budget-nodes", type=int)
    common.add_argument("--budget-secs", type=float)
    common.add_argument("--certs", metavar="PATH")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("--timings", action="store_true",
                        help="store per-certificate wall time (breaks byte-reproducibility)")

    p = argparse.ArgumentParser(prog="bbt-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="spectrum, influences and invariant of one function")
    sub.add_parser("synth", parents=[common], help="heuristic and repaired ternary masks")
    sub.add_parser("minsupport", parents=[common], help="certified minimum-support masks")
    sub.add_parser("npn", parents=[common], help="enumerate NPN canonical representatives")
    c = sub.add_parser("census", parents=[common], help="separation and degree censuses")
    c.add_argument("--scaling", action="store_true", help="also write the family scaling table")
    sub.add_parser("correlate", parents=[common], help="correlation tables from a certificate file")
    sub.add_parser("verify", parents=[common], help="independent integer audit of a certificate file")
    return p


# ---------------------------------------------------------------------------
# helpers


def _heartbeat(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _out_path(cfg: RunConfig, default: str, explicit: str | None = None) -> Path:
    path = Path(explicit or cfg.out or certstore.data_dir() / default)
    if path.exists() and not cfg.force:
        raise UsageError(f"{path} exists; pass --force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _out_dir(cfg: RunConfig, default: str) -> Path:
    path = Path(cfg.out or certstore.data_dir() / default)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_new(cfg: RunConfig, path: Path, text: str) -> None:
    if path.exists() and not cfg.force:
        raise UsageError(f"{path} exists; pass --force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _parse_family(text: str, n: int) -> families.FamilySpec:
    kind, _, k = text.partition(":")
    kind = {"and": "and_", "or": "or_"}.get(kind, kind)
    try:
        return families.FamilySpec(kind, n, int(k) if k else 1)
    except (families.InvalidSpec, ValueError) as exc:
        raise UsageError(f"bad --family {text!r}: {exc}")


def _require_n(cfg: RunConfig, lo: int = 1, hi: int = 20) -> int:
    if cfg.n is None:
        raise UsageError(f"{cfg.command} needs --n")
    if not lo <= cfg.n <= hi:
        raise UsageError(f"{cfg.command} supports {lo} <= n <= {hi}")
    return cfg.n


def _select_fids(cfg: RunConfig, max_all: int = 4) -> list[int]:
    n = cfg.n
    chosen = [cfg.fid is not None, cfg.family is not None, cfg.all, cfg.sample is not None]
    if sum(chosen) != 1:
        raise UsageError("choose exactly one of --fid, --family, --all, --sample")
    if cfg.fid is not None:
        if not 0 <= cfg.fid < (1 << (1 << n)):
            raise UsageError(f"fid {cfg.fid:#x} out of range for n={n}")
        return [cfg.fid]
    if cfg.family is not None:
        return [families.generate(_parse_family(cfg.family, n)).fid]
    if cfg.all:
        if n > max_all:
            raise UsageError(f"--all is limited to n <= {max_all}; use --sample")
        return list(range(1 << (1 << n)))
    mode = "npn_canonical" if cfg.mode == "npn" else "uniform"
    try:
        return analytics.sampler(mode, n, cfg.sample, cfg.seed)
    except analytics.UniverseMissing as exc:
        raise UsageError(str(exc))


def _pmap(fn, items, threads: int):
    if threads <= 1:
        return map(fn, items)
    pool = ThreadPoolExecutor(max_workers=threads)
    return pool.map(fn, items)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(cfg: RunConfig):
    n = _require_n(cfg)
    if cfg.all or cfg.sample is not None:
        raise UsageError("analyze takes a single --fid or --family")
    fid = _select_fids(cfg)[0]
    f = TruthTable.from_fid(fid, n)
    s = fwht(f)
    v = influences(s)
    prof = contraction_profile(v)
    ok = True
    try:
        slack = check_bounds(prof, v)
        bounds = {k: _frac(x) for k, x in asdict(slack).items()}
    except BoundViolation as exc:
        ok, bounds = False, {"error": str(exc)}
    report = {
        "fid": format_fid(fid, n),
        "n": n,
        "spectrum": [int(c) for c in s.coeffs],
        "spectrum_scale": f"2^{n}",
        "influences": [_frac(x) for x in v.values],
        "total_influence": _frac(v.total),
        "exponents": [_frac(x) for x in prof.exponents],
        "log2_mu": _frac(prof.log2_mu),
        "log2_mu_2dp": families.format_2dp(prof.log2_mu),
        "algebraic_degree": prof.algebraic_degree,
        "bound_slack": bounds,
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if cfg.out:
        _write_new(cfg, Path(cfg.out), text + "\n")
    summary = {"fid": report["fid"], "log2_mu": report["log2_mu"],
               "algebraic_degree": prof.algebraic_degree, "bounds_ok": ok}
    return summary, EXIT_OK if ok else EXIT_VERIFY


def cmd_synth(cfg: RunConfig):
    n = _require_n(cfg, 1, 10)
    fids = _select_fids(cfg)
    out = _out_path(cfg, f"synth_n{n}.jsonl")
    certs_path = _out_path(cfg, "", cfg.certs) if cfg.certs else None

    def run(fid):
        f = TruthTable.from_fid(fid, n)
        return f, synthesize(f, heuristic_only=cfg.heuristic_only, tau=cfg.tau)

    records, certs, status = [], [], {}
    last = time.monotonic()
    for i, (f, res) in enumerate(_pmap(run, fids, cfg.threads), 1):
        records.append(res.record(f))
        status[res.status] = status.get(res.status, 0) + 1
        if res.mask is not None and certs_path is not None:
            certs.append(_synth_certificate(f, res))
        if time.monotonic() - last > HEARTBEAT_SECS:
            _heartbeat(f"synth: {i}/{len(fids)}")
            last = time.monotonic()
    out.write_text(dumps_records(records))
    if certs_path is not None:
        certstore.save(certs, certs_path, n=n)
    successes = len(fids) - status.get("failed", 0)
    print(f"{successes} of {len(fids)} functions synthesized ({100 * successes / len(fids):.1f}%)")
    print(f"records written to {out}")
    summary = {"n": n, "total": len(fids), "successes": successes, "by_status": status,
               "tau": cfg.tau, "heuristic_only": cfg.heuristic_only, "out": str(out)}
    if certs_path is not None:
        summary["certs"] = str(certs_path)
    failed_hard = not cfg.heuristic_only and status.get("failed", 0) > 0
    return summary, EXIT_VERIFY if failed_hard else EXIT_OK


def _synth_certificate(f: TruthTable, res):
    from .minsupport import Certificate
    from .synthesis import verify

    chk = verify(res.mask, f)
    return Certificate(f.fid, f.n, res.mask, res.mask.support, chk.margin, False,
                       f"synth:{res.strategy}")


def cmd_minsupport(cfg: RunConfig):
    n = _require_n(cfg, 1, 5)
    fids = sorted(set(_select_fids(cfg)))
    path = _out_path(cfg, f"certs_n{n}.jsonl", cfg.certs)
    budget = Budget.default_for(n)
    if cfg.budget_nodes is not None or cfg.budget_secs is not None:
        budget = Budget(cfg.budget_nodes, cfg.budget_secs)

    def run(fid):
        try:
            return fid, min_support_exact(TruthTable.from_fid(fid, n), budget)
        except BudgetExhausted as exc:
            return fid, exc

    census = SupportCensus(n, {})
    last = time.monotonic()
    interrupted = False
    with certstore.CertificateWriter(path, n, len(fids), timings=cfg.timings) as writer:
        try:
            for i, (fid, res) in enumerate(_pmap(run, fids, cfg.threads), 1):
                if isinstance(res, BudgetExhausted):
                    census.exhausted.append(fid)
                else:
                    writer.write(res)
                    census.certificates.append(res)
                    census.histogram[res.min_support] = census.histogram.get(res.min_support, 0) + 1
                if time.monotonic() - last > HEARTBEAT_SECS:
                    _heartbeat(f"minsupport: {i}/{len(fids)} solved={len(census.certificates)}")
                    last = time.monotonic()
        except KeyboardInterrupt:
            interrupted = True
            writer.close(truncated=True)
    census.histogram = dict(sorted(census.histogram.items()))
    csv_path = path.with_name(path.stem + "_support.csv")
    if census.certificates:
        _write_new(cfg, csv_path, census.csv())
    summary = {"n": n, "requested": len(fids), "solved": len(census.certificates),
               "exhausted": len(census.exhausted),
               "exhausted_fids": [format_fid(x, n) for x in census.exhausted],
               "histogram": {str(k): c for k, c in census.histogram.items()},
               "certs": str(path)}
    if census.certificates:
        summary.update(mean=round(census.mean, 6), max=census.max, all_odd=census.all_odd)
        for k, c in census.histogram.items():
            print(f"support {k:2d}: {c}")
        print(f"mean {census.mean:.4f}  max {census.max}  all odd: {census.all_odd}")
    if census.exhausted:
        print(f"{len(census.exhausted)} solves exhausted the budget (excluded)")
    if interrupted:
        summary["truncated"] = True
        return summary, EXIT_INTERRUPTED
    if census.certificates and not census.all_odd:
        return summary, EXIT_VERIFY
    return summary, EXIT_BUDGET if census.exhausted else EXIT_OK


def cmd_npn(cfg: RunConfig):
    n = _require_n(cfg, 1, npn.MAX_NPN_N)
    path = _out_path(cfg, f"npn_n{n}.txt")
    last = [time.monotonic()]

    def progress(frac, found):
        if time.monotonic() - last[0] > HEARTBEAT_SECS:
            _heartbeat(f"npn: {100 * frac:.1f}% of fids scanned, {found} classes")
            last[0] = time.monotonic()

    try:
        uni = npn.enumerate_universe(n, progress=progress)
    except npn.UniverseMemoryError as exc:
        raise UsageError(str(exc))
    uni.save(path)
    expected = npn.KNOWN_CLASS_COUNTS.get(n)
    ok = expected is None or uni.class_count == expected
    print(f"{uni.class_count} classes")
    print(f"universe written to {path}")
    summary = {"n": n, "classes": uni.class_count, "expected": expected, "ok": ok,
               "out": str(path)}
    return summary, EXIT_OK if ok else EXIT_VERIFY


def cmd_census(cfg: RunConfig):
    n = cfg.n if cfg.n is not None else 3
    if not 1 <= n <= 4:
        raise UsageError("census is exhaustive and supports n <= 4")
    outdir = _out_dir(cfg, f"census_n{n}")
    rep = analytics.separation_census(n)
    _write_new(cfg, outdir / "separation.csv", rep.breakdown_csv())
    deg = "degree,count\n" + "".join(f"{k},{c}\n" for k, c in rep.degree_histogram.items())
    _write_new(cfg, outdir / "degree.csv", deg)
    print(f"separation pairs: {rep.separation_pair_count}")
    for k, c in sorted(rep.pairs_by_total_influence.items()):
        print(f"  I = {k}: {c}")
    if rep.witness:
        f, g = rep.witness
        print(f"witness: {format_fid(f, n)} vs {format_fid(g, n)}, "
              f"log2 mu {rep.witness_log2_mu[0]} vs {rep.witness_log2_mu[1]}")
    print("degree histogram: " + ", ".join(f"{k}:{c}" for k, c in rep.degree_histogram.items()))
    summary = {"n": n, "universe": rep.universe_size,
               "separation_pairs": rep.separation_pair_count,
               "pairs_by_total_influence": {_frac(k): c for k, c in rep.pairs_by_total_influence.items()},
               "degree_histogram": {str(k): c for k, c in rep.degree_histogram.items()},
               "out": str(outdir)}
    if rep.witness:
        summary["witness"] = [format_fid(x, n) for x in rep.witness]
        summary["witness_log2_mu"] = [_frac(x) for x in rep.witness_log2_mu]
    if cfg.scaling:
        rows = families.scaling_table()
        _write_new(cfg, outdir / "scaling.csv", families.scaling_csv(rows))
        summary["scaling_rows"] = len(rows)
    return summary, EXIT_OK


def cmd_correlate(cfg: RunConfig):
    if not cfg.certs:
        raise UsageError("correlate needs --certs PATH")
    try:
        cset = certstore.load(cfg.certs)
    except (certstore.CorruptRecord, certstore.VerificationFailed) as exc:
        print(str(exc))
        return {"error": str(exc), "fid": getattr(exc, "fid", None)}, EXIT_VERIFY
    n = cset.n
    if cfg.n is not None and cfg.n != n:
        raise UsageError(f"--n {cfg.n} but the certificate file is for n={n}")
    optimal = [c for c in cset if c.optimal]
    if len(optimal) < 3:
        raise UsageError("need at least 3 optimal certificates")
    mode = "full" if len(optimal) == 1 << (1 << n) else "sample"
    rep = analytics.correlation_study(optimal, mode=mode, seed=cfg.seed)
    outdir = _out_dir(cfg, f"correlate_n{n}")
    _write_new(cfg, outdir / "marginal.csv", rep.marginal_csv())
    _write_new(cfg, outdir / "conditional.csv", rep.conditional_csv())
    print(rep.marginal_csv(), end="")
    print(rep.conditional_csv(), end="")
    print(rep.p_value_method)
    summary = {"n": n, "size": rep.size, "mode": mode, "bins": len(rep.conditional),
               "low_power_bins": sum(b.low_power for b in rep.conditional), "out": str(outdir)}
    return summary, EXIT_OK


def cmd_verify(cfg: RunConfig):
    if not cfg.certs:
        raise UsageError("verify needs --certs PATH")
    if not Path(cfg.certs).exists():
        raise UsageError(f"no such file: {cfg.certs}")
    rep = certstore.audit(cfg.certs)
    for fid, reason in rep.failures:
        print(f"FAIL {fid}: {reason}")
    print(f"{rep.passed}/{rep.records} records pass; {rep.int_ops} integer ops "
          f"({rep.dense_ops} dense-equivalent multiplies) in {rep.elapsed:.3f} s")
    summary = {"records": rep.records, "passed": rep.passed, "failed": len(rep.failures),
               "failed_fids": [f for f, _ in rep.failures[:50]], "int_ops": rep.int_ops,
               "dense_ops": rep.dense_ops, "seconds": round(rep.elapsed, 3),
               "truncated": rep.truncated}
    return summary, EXIT_OK if rep.ok else EXIT_VERIFY


HANDLERS = {
    "analyze": cmd_analyze,
    "synth": cmd_synth,
    "minsupport": cmd_minsupport,
    "npn": cmd_npn,
    "census": cmd_census,
    "correlate": cmd_correlate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        summary, code = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        summary, code = {"error": str(exc)}, EXIT_USAGE
    summary = {"command": args.command, "exit_code": code, **summary}
    print(json.dumps(summary, sort_keys=True), flush=True)
    return code


if __name__ == "__main__":
    sys.exit(main())
