#!/usr/bin/env python3
"""Compare architecture families by per-training-step cost as cores grow.

Three families with comparable accuracy budgets: the three-hidden-layer
construction (wide, constant depth), a uniform width-N depth-L stack, and a
fixed-width depth-N tower.  With few cores everything is compute-bound and
the deep tower is competitive; once the core count passes the square of the
width, the wide families saturate at log cost while the tower stays linear
in its depth.
"""

from reluconstruct import ArchSpec, CostParams, dist_time, regime_table, shared_time

params = CostParams(t_s=0.5, t_w=0.05)
N, L, d = 64, 8, 2

print(f"N = {N}, L = {L}, d = {d}; times in flop units (c_flop = 1)\n")
header = f"{'m':>8} | {'shallow-3layer':>15} {'uniform-depthL':>15} {'fixed-width-depthN':>19}"
print(header)
print("-" * len(header))
for m in (1, 16, 256, 4096, 10**6):
    rows = {r["family"]: r for r in regime_table([ArchSpec(N, L, m)], params, d=d)}
    print(
        f"{m:>8} | {rows['shallow-3layer']['T_shared']:>15.1f} "
        f"{rows['uniform-depthL']['T_shared']:>15.1f} "
        f"{rows['fixed-width-depthN']['T_shared']:>19.1f}"
    )

print("\nshared vs distributed memory at m = 256 (start-up 0.5, per-word 0.05):")
a = ArchSpec(N, L, 256)
print(f"  shared time     : {shared_time(a, params):10.2f}")
print(f"  distributed time: {dist_time(a, params):10.2f}  (adds the communication terms)")

rows = {r["family"]: r for r in regime_table([ArchSpec(N, L, 256)], params, d=d)}
print("\nweights per family (exact parameter counts):")
for fam, row in rows.items():
    print(f"  {fam:<20} {row['n_weights']:>8}")
