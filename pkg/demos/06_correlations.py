"""Does mu predict minimum support once total influence is fixed?  Full n=4 universe."""
from fractions import Fraction

from bbt_lab.analytics import correlation_study
from bbt_lab.minsupport import support_census

census = support_census(4)        # about 20 s
rep = correlation_study(census.certificates)
print(rep.marginal_csv())
print(rep.conditional_csv())
b = rep.bin(Fraction(7, 4))
print(f"I=1.75: rho(mu, support) = {b.rho_mu:+.3f}, rho(H, support) = {b.rho_h:+.3f}")
