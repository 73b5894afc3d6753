"""Certified minimum support: the n=3 census and a few n=5 functions under a budget."""
from bbt_lab import certstore
from bbt_lab.analytics import sampler
from bbt_lab.minsupport import Budget, support_census

c3 = support_census(3)
print("n=3 histogram", c3.histogram, "mean", round(c3.mean, 3))
text = certstore.dumps(c3.certificates, n=3)
rep = certstore.audit(text, is_text=True)
print(f"audit: {rep.passed}/{rep.records} records re-verified")

fids = sampler("uniform", 5, 20, seed=1)
c5 = support_census(5, fids=fids, budget=Budget(nodes=10**7, seconds=10))
print("n=5 sample of 20:", c5.histogram, "exhausted", len(c5.exhausted))
