"""Spectrum, influences and the contraction exponent of a few small functions.

Run: python demos/01_spectrum_and_invariant.py
"""
from bbt_lab import FamilySpec, check_bounds, contraction_profile, fwht, generate, influences
from bbt_lab.families import format_2dp

for kind, n in [("parity", 3), ("majority", 3), ("dictator", 3), ("and_", 3), ("tribes", 5)]:
    f = generate(FamilySpec(kind, n))
    spec = fwht(f)
    v = influences(spec)
    prof = contraction_profile(v)
    slack = check_bounds(prof, v)
    print(f"{kind:9s} n={n}  fid={f.fid:#x}")
    print(f"  spectrum (2^n fhat): {spec.coeffs.tolist()}")
    print(f"  influences: {[str(x) for x in v.values]}  total {v.total}")
    print(f"  log2 mu = {prof.log2_mu} ({format_2dp(prof.log2_mu)}), Jensen slack {slack.jensen}")
