"""Constant-step subgradient iteration x_{k+1} = x_k - alpha * s_k, s_k in the subdifferential.

The inclusion leaves the subgradient selection free; SelectionPolicy pins it
down.  The default minimal-norm selection matches the slow-solution
convention of the continuous flow and makes discrete/continuous comparisons
canonical.

Reproducibility contract: every random draw comes from a counter-based
Philox generator.  A trajectory owns a single 64-bit seed; batch drivers
derive per-sample seeds with ``derive_seed(root, *indices)`` (a SeedSequence
keyed on the index tuple), so parallel or reordered execution cannot change
any stream.  ``run`` with identical arguments reproduces trajectories
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import CatalogFunction, as_point, minimal_norm_element
from .errors import NonFiniteState, OutOfHorizon

__all__ = [
    "DIVERGENCE_LIMIT",
    "SelectionPolicy",
    "MINIMAL_NORM",
    "Trajectory",
    "InterpolatedPath",
    "step",
    "run",
    "run_batch",
    "interpolate",
    "first_exit",
    "sample_ball",
    "derive_seed",
    "make_rng",
]

# any coordinate beyond this magnitude marks the trajectory as diverged
DIVERGENCE_LIMIT = 1e100

_POLICY_KINDS = ("minimal_norm", "random_extreme", "fixed_index")


@dataclass(frozen=True)
class SelectionPolicy:
    """How to pick one subgradient from the generator set.

    minimal_norm   argmin-norm element of the hull (deterministic)
    random_extreme uniform over the generators (seed-dependent)
    fixed_index    generator ``index`` modulo the generator count
    """

    kind: str = "minimal_norm"
    index: int = 0

    def __post_init__(self):
        if self.kind not in _POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")


MINIMAL_NORM = SelectionPolicy("minimal_norm")


def derive_seed(root: int, *indices: int) -> int:
    """64-bit per-stream seed from a root seed and an index tuple."""
    words = np.random.SeedSequence((int(root),) + tuple(int(i) for i in indices)).generate_state(2)
    return int(words[0]) | (int(words[1]) << 32)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def sample_ball(center, radius: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points uniform in the closed ball B(center, radius).

    Isotropic direction times radius * u^(1/dim), the standard volume-uniform
    construction; documented so seeded experiments stay reproducible.
    """
    center = as_point(center)
    dim = center.shape[0]
    direction = rng.standard_normal((n, dim))
    norms = np.sqrt((direction * direction).sum(axis=1))
    norms[norms == 0.0] = 1.0
    direction /= norms[:, None]
    radii = radius * rng.uniform(0.0, 1.0, n) ** (1.0 / dim)
    return center[None, :] + radii[:, None] * direction


def _select(gens: np.ndarray, policy: SelectionPolicy, rng: np.random.Generator | None) -> np.ndarray:
    if gens.shape[0] == 1:
        return gens[0]
    if policy.kind == "minimal_norm":
        return minimal_norm_element(gens)
    if policy.kind == "fixed_index":
        return gens[policy.index % gens.shape[0]]
    if rng is None:
        raise ValueError("random_extreme selection needs an rng")
    return gens[int(rng.integers(gens.shape[0]))]


def step(fn: CatalogFunction, x, alpha: float, policy: SelectionPolicy = MINIMAL_NORM,
         rng: np.random.Generator | None = None):
    """One update: returns (x - alpha*s, s) with s selected per policy.

    The rng advances only for random_extreme at points with more than one
    generator.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    x = as_point(x, fn.dim)
    if not np.all(np.isfinite(x)):
        raise NonFiniteState(f"non-finite state {x}")
    gens = fn.generators(x, 0.0)
    s = _select(gens, policy, rng)
    return x - alpha * s, s


@dataclass(frozen=True)
class Trajectory:
    """Recorded iterate sequence with everything needed for bit-exact replay.

    points has shape (k_last+1, dim); chosen_subgradients has one row per
    executed step and satisfies points[k+1] == points[k] - alpha * chosen[k]
    exactly (the stored arrays are the arithmetic results themselves).
    """

    fn_id: str
    alpha: float
    points: np.ndarray
    chosen_subgradients: np.ndarray
    policy: SelectionPolicy
    seed: int
    diverged_at: int | None = None

    def __post_init__(self):
        self.points.setflags(write=False)
        self.chosen_subgradients.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_steps(self) -> int:
        return self.chosen_subgradients.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.alpha * np.arange(self.points.shape[0])


def run(fn: CatalogFunction, x0, alpha: float, n_steps: int,
        policy: SelectionPolicy = MINIMAL_NORM, seed: int = 0,
        stop: tuple | None = None) -> Trajectory:
    """Iterate ``n_steps`` times, or until leaving the optional stop ball or diverging.

    stop is (center, radius); the first point outside the ball is recorded
    and iteration halts there.  Divergence (any |coordinate| > 1e100 or
    non-finite) is recorded in diverged_at, never raised.  n_steps = 0 is
    allowed and records the initial point alone.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    x = as_point(x0, fn.dim)
    rng = make_rng(seed) if policy.kind == "random_extreme" else None
    points = np.empty((n_steps + 1, fn.dim))
    subgrads = np.empty((n_steps, fn.dim))
    points[0] = x
    diverged_at = None
    if stop is not None:
        c = as_point(stop[0], fn.dim)
        r = float(stop[1])
    k_last = n_steps
    for k in range(n_steps):
        if stop is not None and np.linalg.norm(points[k] - c) > r:
            k_last = k
            break
        gens = fn.generators(points[k], 0.0)
        s = _select(gens, policy, rng)
        subgrads[k] = s
        points[k + 1] = points[k] - alpha * s
        if not np.all(np.abs(points[k + 1]) <= DIVERGENCE_LIMIT):
            diverged_at = k + 1
            k_last = k + 1
            break
    return Trajectory(
        fn_id=fn.name,
        alpha=float(alpha),
        points=points[: k_last + 1].copy(),
        chosen_subgradients=subgrads[:k_last].copy(),
        policy=policy,
        seed=int(seed),
        diverged_at=diverged_at,
    )


def run_batch(fn: CatalogFunction, x0s: np.ndarray, alpha: float, n_steps: int,
              exit_center=None, exit_radius: float | None = None):
    """Vectorized minimal-norm iteration over many initial points.

    Per-sample arithmetic is elementwise identical to ``run`` with the
    minimal_norm policy, so any sample replayed through ``run`` reproduces
    the same iterates bit for bit.  Returns (exit_index, last_points):
    exit_index[i] is the first k with ||x_k - center|| > radius (0 if the
    start is already outside), or -1 if the sample never left the ball
    within n_steps.  Without an exit ball, runs all samples n_steps and
    returns exit_index filled with -1.
    """
    pts = np.array(x0s, dtype=float, copy=True)
    n = pts.shape[0]
    exit_index = np.full(n, -1, dtype=np.int64)
    last = np.array(pts, copy=True)
    check_exit = exit_center is not None
    if check_exit:
        center = as_point(exit_center, fn.dim)
        r2 = float(exit_radius) ** 2
        d = pts - center[None, :]
        out = (d * d).sum(axis=1) > r2
        exit_index[out] = 0
        last[out] = pts[out]
        alive_ids = np.flatnonzero(~out)
        pts = pts[~out]
    else:
        alive_ids = np.arange(n)
    for k in range(1, n_steps + 1):
        if alive_ids.size == 0:
            break
        pts = pts - alpha * fn.min_norm_many(pts)
        if check_exit:
            d = pts - center[None, :]
            out = (d * d).sum(axis=1) > r2
            if out.any():
                gone = alive_ids[out]
                exit_index[gone] = k
                last[gone] = pts[out]
                alive_ids = alive_ids[~out]
                pts = pts[~out]
    if alive_ids.size:
        last[alive_ids] = pts
    return exit_index, last


@dataclass(frozen=True)
class InterpolatedPath:
    """Piecewise-linear curve through the iterates with nodes at t = alpha*k.

    Defined on [0, min(horizon, alpha * n_steps)].
    """

    trajectory: Trajectory
    horizon: float

    @property
    def t_max(self) -> float:
        return min(self.horizon, self.trajectory.alpha * self.trajectory.n_steps)


def interpolate(path: InterpolatedPath, t: float) -> np.ndarray:
    """Value of the interpolated curve at time t; exact at every node."""
    traj = path.trajectory
    alpha = traj.alpha
    if t < 0.0 or t > path.t_max:
        raise OutOfHorizon(f"t={t} outside [0, {path.t_max}]")
    k = int(np.floor(t / alpha))
    k = min(k, traj.n_steps - 1) if traj.n_steps else 0
    # node hits return the stored point itself, not a reconstruction
    if t == alpha * k:
        return traj.points[k].copy()
    if t == alpha * (k + 1):
        return traj.points[k + 1].copy()
    w = (t - alpha * k) / alpha
    return traj.points[k] + w * (traj.points[k + 1] - traj.points[k])


def first_exit(traj: Trajectory, center, radius: float) -> int | None:
    """Smallest k with ||points[k] - center|| > radius, or None."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    center = as_point(center, traj.dim)
    d = traj.points - center[None, :]
    outside = (d * d).sum(axis=1) > radius * radius
    hits = np.flatnonzero(outside)
    return int(hits[0]) if hits.size else None
