"""Layer-wise cancellation of optimal masks and how repair shifts the input proxy."""
import numpy as np

from bbt_lab.cancellation import cancellation_support_correlation, repair_proxy_shift
from bbt_lab.minsupport import support_census

c3 = support_census(3)
print(f"n=3 Pearson r(mean rho_tilde, support) = {cancellation_support_correlation(c3.certificates):+.3f}")
fids = np.random.default_rng(42).choice(1 << 16, size=2000, replace=False)
s = repair_proxy_shift(fids, 4)
print(f"n=4 input proxy: heuristic {s.heuristic_mean:.3f} -> repaired {s.repaired_mean:.3f}")
