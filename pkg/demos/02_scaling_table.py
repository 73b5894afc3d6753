"""Exact log2 mu for the standard families at odd n up to 15."""
from bbt_lab.families import scaling_table

rows = scaling_table()
ns = sorted({r["n"] for r in rows})
print("family    " + "".join(f"{n:>8d}" for n in ns))
for fam in dict.fromkeys(r["family"] for r in rows):
    vals = [r["log2_mu_2dp"] for r in rows if r["family"] == fam]
    print(f"{fam:10s}" + "".join(f"{v:>8s}" for v in vals))
