"""NPN classes: counts for small n and orbit invariance of the diagnostics."""
import random
import time

from bbt_lab.npn import enumerate_universe, npn_invariance_audit

for n in (1, 2, 3, 4):
    t0 = time.perf_counter()
    uni = enumerate_universe(n)
    print(f"n={n}: {uni.class_count} classes ({time.perf_counter() - t0:.2f} s)")

r = random.Random(5)
rep = npn_invariance_audit([r.randrange(1 << 16) for _ in range(20)], 4, seed=5,
                           transforms=50, check_support=True)
print(f"invariance audit: {rep.functions} functions x {rep.transforms_per_function} "
      f"transforms, {len(rep.failures)} failures")
# n=5 takes well under a minute on a laptop: enumerate_universe(5)
