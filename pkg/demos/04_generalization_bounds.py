# PAC-Bayes style bound calculators on toy posteriors.
#
# The calculators only need sample counts, a confidence level, and a KL
# divergence between unit-variance Gaussian posteriors, so they run on
# anything that exposes a mean vector.

import numpy as np

from segboost import (
    GaussianPosterior,
    empirical_discrepancy,
    gap_bound,
    kl_gaussian_product,
    risk_upper_bound,
    threshold_rule,
)

# the gap bound shrinks with sample count and grows with divergence
print("        N=100    N=1000   N=10000")
for kl in (0.0, 1.0, 5.0, 25.0):
    row = "  ".join(f"{gap_bound(kl, n, 0.05):.5f}" for n in (100, 1000, 10000))
    print(f"kl={kl:5.1f} {row}")

# two KL conventions for the same posterior pair; the rescaled one is
# exactly 2 * dim times the standard product-Gaussian divergence
rng = np.random.default_rng(3)
q = GaussianPosterior(rng.normal(size=4))
p = GaussianPosterior(rng.normal(size=4))
standard = kl_gaussian_product(q, p, "standard")
paper = kl_gaussian_product(q, p, "paper")
print(f"\nstandard KL {standard:.6f}, rescaled {paper:.6f}, ratio {paper / standard:.1f}")

for mode, kl in (("standard", standard), ("paper", paper)):
    bound = risk_upper_bound(0.12, q, p, n=2000, delta=0.05, mode=mode)
    print(f"risk upper bound ({mode:8s}) = {bound:.4f}  [empirical 0.12, kl {kl:.3f}]")

# discrepancy between domains: how differently a hypothesis family can
# behave on two unlabeled samples
family = [threshold_rule(t) for t in np.linspace(0.5, 4.5, 9)]
source = rng.normal(2.0, 1.0, size=400)
near = rng.normal(2.1, 1.0, size=400)
far = rng.normal(3.5, 1.0, size=400)
print(f"\ndiscrepancy source vs source {empirical_discrepancy(family, source, source):.4f}")
print(f"discrepancy source vs near   {empirical_discrepancy(family, source, near):.4f}")
print(f"discrepancy source vs far    {empirical_discrepancy(family, source, far):.4f}")
