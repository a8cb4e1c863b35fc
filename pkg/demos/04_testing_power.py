#!/usr/bin/env python3
"""Paired two-sample testing under shuffling, desk scale.

The paired edge-density test exploits the edge-wise correlation of the
pair; shuffling destroys the pairing and its power advantage, and
seeded matching restores it. Reduced replicate counts keep this under
a minute; raise mc_reps / n_null for smoother curves.
"""

from corrmatch import power_er_experiment

rows = power_er_experiment(
    p=0.4, q=0.375, n=50, rho=0.7,
    s_grid=(0, 10, 30, 50), x_grid=(0, 25, 50),
    mc_reps=150, n_null=299, master_seed=5,
)

power = {(r["s"], r["x"], r["variant"]): r["power"] for r in rows}
print("power of H0: p=q vs H1: p!=q   (rows: seeds s; cols: shuffle cap x)")
for variant in ("paired", "pooled", "matched"):
    print(f"\n{variant}:")
    print("  s\\x    0     25     50")
    for s in (0, 10, 30, 50):
        vals = " ".join(f"{power[(s, x, variant)]:6.3f}" for x in (0, 25, 50))
        print(f"  {s:3d} {vals}")

print("\nreading: paired power collapses as x grows at s=0; the matched")
print("variant holds near the perfect-pairing level once a few seeds exist;")
print("the pooled test ignores pairing entirely and stays flat.")
