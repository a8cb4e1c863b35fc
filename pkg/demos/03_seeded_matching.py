#!/usr/bin/env python3
"""Seeded graph matching: plant a shuffle, then recover it.

A correlated pair is shuffled on its non-seed vertices; SGM with a
handful of seeds recovers the planted correspondence, while unseeded
matching from the barycenter mostly fails at this size.
"""

import numpy as np

from corrmatch import (
    RngStream,
    apply_permutation,
    edge_disagreements,
    er_params,
    faq_match,
    identity_seeds,
    invert_permutation,
    sample_rho_sbm,
    sample_subset_shuffle,
    sgm_match,
)

n, rho = 120, 0.9
gen = RngStream(42).generator()
a, b = sample_rho_sbm(er_params(n, 0.3), rho, gen)

seeds = np.arange(8)
sigma = sample_subset_shuffle(n, seeds, n - len(seeds), gen)
b_sh = apply_permutation(b, sigma)
moved = int((sigma != np.arange(n)).sum())
print(f"n={n}, rho={rho}: shuffled {moved} of {n - len(seeds)} unseeded vertices")
print(f"disagreements before matching: {edge_disagreements(a, b_sh)}")
print(f"(at the true alignment:        {edge_disagreements(a, b)})")

res = sgm_match(a, b_sh, seeds=identity_seeds(seeds))
recovered = int((res.permutation == invert_permutation(sigma)).sum())
print(f"\nSGM with {len(seeds)} seeds: objective={res.objective}, "
      f"iterations={res.iterations}, converged={res.converged}")
print(f"vertices mapped exactly as planted: {recovered}/{n}")
print(f"disagreements after matching:  {res.objective // 2}")

res0 = faq_match(a, b_sh)  # barycenter init, no seeds
print(f"\nunseeded FAQ from barycenter: disagreements after = {res0.objective // 2} "
      f"(seeds matter)")
