"""Classical constant-step guarantees, checked on the convex catalog entries.

With subgradient norms bounded by c on the traversed region:
  * the best objective gap satisfies liminf f(x_k) - inf f <= c^2 * alpha / 2;
  * getting within epsilon of that bound takes at most
    floor(d(x0, X)^2 / (alpha * epsilon)) iterations;
  * under quadratic growth (f >= beta * d(., X)^2 near X, e.g. beta = 1/2
    for the quadratic), iterates end up within c * sqrt(alpha / (2 beta))
    of the minimizers for alpha <= 1/(2 beta).
"""

from nsdyn import convex_bounds_report, get_function

print("abs_sum (dim 1), alpha = 0.1, epsilon = 0.1:")
for x0 in (1.0, 0.07):
    rep = convex_bounds_report(get_function("abs_sum", 1), [x0], 0.1, 0.1, n_steps=400)
    print(f"  x0={x0:<5} budget={rep.iters_budget:<4} gap-within-budget={rep.achieved_within_budget}"
          f"  liminf gap={rep.liminf_gap:.4g} <= c^2*alpha/2 = {rep.bound_c2a2:.4g}")

print()
print("quad (dim 1), x0 = 1, quadratic growth beta = 1/2:")
for alpha in (1.0, 0.5, 0.1):
    rep = convex_bounds_report(get_function("quad", 1), [1.0], alpha, 0.1, n_steps=300)
    print(f"  alpha={alpha:<4} terminal distance {rep.terminal_distance:.3e}"
          f" <= c*sqrt(alpha/(2*beta)) = {rep.dist_bound:.4g}")

print()
print("The oscillation tail is visible directly: abs_sum from 0.07 at alpha=0.1")
from nsdyn import run  # noqa: E402

traj = run(get_function("abs_sum", 1), [0.07], 0.1, 8)
print("  iterates:", ", ".join(f"{v:+.2f}" for v in traj.points[:, 0]))
print("  f oscillates between 0.07 and 0.03, so the liminf gap is 0.03 < 0.05.")
