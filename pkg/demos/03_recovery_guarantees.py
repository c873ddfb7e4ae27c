"""Isometry thresholds, error-bound constants, and bound verification.

Computes the guarantee threshold and its constants over a grid, samples
the empirical isometry distortion of a Gaussian map, and verifies both
recovery bounds on a solved instance.

Run:  python demos/03_recovery_guarantees.py
"""

import math

import numpy as np

import tubal as tb
from tubal.rng import derive_key

print("== guarantee threshold sqrt((t-1)/(n3^2+t-1)) ==")
for n3 in (1, 3, 5):
    row = "  ".join(f"t={t:>4g}: {tb.ric_threshold(t, n3):.4f}" for t in (1.5, 2, 5, 20))
    print(f"n3={n3}:  {row}")
print("(at n3=1 and t=2 this is the matrix-case sqrt(1/2))")

print()
print("== bound constants at delta = half the threshold ==")
t, r, n3, lam = 5.0, 1, 5, 0.1
delta = 0.5 * tb.ric_threshold(t, n3)
eta1, eta2 = tb.eta_constants(delta, t, n3)
c = tb.bound_constants(delta, t, r, n3, lam, epsilon=lam / 2)
cm = tb.matched_bound_constants(delta, t, r, n3)
print(f"eta1={eta1:.4f}  eta2={eta2:.4f}  (eta2 < 1 below the threshold)")
print(f"general constants  c1..c4   : {np.round(c, 4)}")
print(f"matched-noise form c1t..c4t : {np.round(cm, 4)}  (c2 == c2t*lam: "
      f"{math.isclose(c[1], cm[1] * lam)})")

print()
print("== empirical distortion of a Gaussian map ==")
n, n3, r = 10, 5, 1
m = 2 * r * (2 * n + 1) * n3
op = tb.gaussian_map(m, (n, n, n3), derive_key(3, "demo3", "map"))
for probe in (1, 2, 5, 10):
    est = tb.estimate_ric(op, probe, trials=50, seed=11)
    print(f"rank {probe:>2}: delta_hat = {est.delta_hat:.3f} "
          f"(lower estimate from {est.trials} samples)")

print()
print("== verify both bounds on a solved noisy instance ==")
x = tb.generate_lowrank(n, n, n3, r, derive_key(3, "demo3", "data"))
sample = tb.add_noise(tb.apply(op, x), 0.01, derive_key(3, "demo3", "noise"))
res = tb.admm_solve(op, sample.y, tb.SolverConfig(lam=0.1))
eps = float(np.linalg.norm(sample.noise))
for t in (8.0, 20.0):
    probe = min(math.ceil(t * r), n)
    est = tb.estimate_ric(op, probe, trials=50, seed=12)
    thr = tb.ric_threshold(t, n3)
    if est.delta_hat >= thr:
        print(f"t={t}: delta_hat {est.delta_hat:.3f} >= threshold {thr:.3f}, skipped")
        continue
    rep = tb.verify_bounds(x, res.x_hat, op, sample.y, r, t, est.delta_hat, 0.1, eps)
    print(f"t={t}: measurement bound {rep.lhs_meas:.4f} <= {rep.rhs_meas:.4f}; "
          f"Frobenius bound {rep.lhs_fro:.4f} <= {rep.rhs_fro:.4f}; "
          f"satisfied={rep.satisfied}")
