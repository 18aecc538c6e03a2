"""Escape anatomy around the cross function's non-strict minimum (1, 0).

Three mechanisms combine:
  1. doubling: once 0 < |x2| <= alpha^2/32 (with x1 >= 1/2), one step at
     least doubles |x2|, so the second coordinate cannot converge to zero;
  2. attractor: |x2| settles near 0.5625 * alpha^2 * x1^3, flipping sign
     every step;
  3. drift: with |x2| pinned there, x1 strictly decreases by about
     0.63 * alpha^4 * x1^5 per step until the iterate exits any small ball.

The drift rate makes escape time scale like 1/alpha^4: visible in seconds
at alpha >= 0.1, ~1.4e5 steps at alpha = 0.05, ~8.5e7 steps at alpha=0.01.
"""

import numpy as np

from nsdyn import cross_update, doubling_check, escape_experiment, get_function, monotone_drift_check, run

print("Doubling region (alpha=0.3, threshold alpha^2/32 = {:.2e}):".format(0.3 ** 2 / 32))
x = np.array([1.0, 1e-12])
for k in range(4):
    y = cross_update(x, 0.3)
    print(f"  |x2|: {abs(x[1]):.3e} -> {abs(y[1]):.3e}"
          f"   (doubling_check: {doubling_check(x, 0.3)})")
    x = y
    if not 0 < abs(x[1]) <= 0.3 ** 2 / 32:
        break

print()
print("Attractor and drift (alpha=0.1, start (1, 0.1)):")
traj = run(get_function("cross"), [1.0, 0.1], 0.1, 2000)
print("  x1 strictly decreasing:", monotone_drift_check(traj))
for k in (0, 10, 100, 1000, 2000):
    p = traj.points[k]
    print(f"  k={k:<5} x1={p[0]:.6f}  x2={p[1]:+.3e}   (|x2| attractor ~ {0.5625 * 0.01 * p[0] ** 3:.3e})")

print()
print("Escape counts from B((1,0), 0.25), 1000 seeded samples, 1e5-step budget:")
for alpha in (0.3, 0.1, 0.05, 0.01):
    stats, _ = escape_experiment(0.25, alpha, 1000, k_max=100_000, seed=7)
    note = "" if stats.escaped_count == 1000 else "   <- escape slower than the budget"
    print(f"  alpha={alpha:<5} escaped {stats.escaped_count:>4}/1000"
          f"  max exit index {stats.max_exit_index:>6}{note}")
print()
print("The non-escapes at small alpha are budget artifacts, not stability:")
print("the 1/alpha^4 drift law puts alpha=0.01 escapes near step 8.5e7, and a")
print("direct 8.45e7-step run from (1, 0.1) confirms the exit.")
