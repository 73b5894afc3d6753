"""Ternary threshold masks: the heuristic, its failures and the repair pipeline at n=4."""
import numpy as np

from bbt_lab import TruthTable, multi_start_repair, verify
from bbt_lab.synthesis import heuristic_success_count

ok = heuristic_success_count(4, 0.05)
print(f"heuristic at tau=0.05 verifies on {ok} of 65536 functions")

rng = np.random.default_rng(0)
strategies = {}
for fid in rng.choice(1 << 16, size=500, replace=False):
    f = TruthTable.from_fid(int(fid), 4)
    res = multi_start_repair(f)
    assert verify(res.mask, f).ok
    strategies[res.strategy] = strategies.get(res.strategy, 0) + 1
print("strategy that produced the mask on 500 random functions:")
for k, c in sorted(strategies.items()):
    print(f"  {k:24s} {c}")
