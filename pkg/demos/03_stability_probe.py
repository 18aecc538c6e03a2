"""Ball-stability probes across the catalog.

For each candidate point the prober searches a (delta, alpha_bar) pair such
that every sampled start in B(x*, delta) keeps its first K iterates inside
B(x*, epsilon) for all tested step sizes alpha <= alpha_bar.  Strict minima
certify; the maximizer of -||x|| and the cross function's non-strict
minimum produce replayable escape witnesses instead.

A "no escape observed" verdict is exactly that: an observation at finite
budgets under one selection policy, not a proof.
"""

import numpy as np

from nsdyn import StabilityQuery, get_function, local_min_check, probe, run

CASES = [
    ("quad", np.zeros(2), 0.1, {}),
    ("abs_sum", np.zeros(2), 0.1, {}),
    ("vee_bowl", np.zeros(2), 0.1, {}),
    ("neg_norm", np.zeros(2), 0.1, {}),
    # measured escape times on cross grow like 0.85/alpha^4 steps, so probe
    # it at step sizes where the exit is observable at desk scale
    ("cross", np.array([1.0, 0.0]), 0.25,
     dict(alpha_grid=(0.3, 0.1), max_iters=20_000, n_samples=16)),
]

for name, x_star, eps, extra in CASES:
    verdict = probe(StabilityQuery(name, x_star, eps, seed=42, **extra))
    line = f"{name:<9} at {np.array2string(x_star)}  eps={eps}: {verdict.status}"
    if verdict.certificate is not None:
        c = verdict.certificate
        line += f"  (delta={c.delta:.4g}, alpha_bar={c.alpha_bar:.4g}, N={c.n_samples}, K={c.max_iters})"
    else:
        w = verdict.witness
        line += f"  (x0={np.array2string(w.x0, precision=4)}, alpha={w.alpha:.4g}, exit at k={w.exit_index})"
    print(line)
    check = local_min_check(get_function(name, x_star.shape[0]), x_star, eps / 2, seed=42)
    print(f"          sampled local-min check: {check.status}")

print()
print("Every witness replays bit for bit from its recorded seed:")
verdict = probe(StabilityQuery("neg_norm", np.zeros(2), 0.1, seed=42))
w = verdict.witness
replay = run(get_function("neg_norm", 2), w.x0, w.alpha, w.exit_index, seed=w.seed)
print("  identical bytes:", replay.points.tobytes() == w.trajectory_ref.points.tobytes(),
      "| exit distance", float(np.linalg.norm(replay.points[-1])), "> 0.1")
