"""Empirical ball-stability probing of the constant-step subgradient iteration.

A point x* is probed for the two-parameter stability property: for a given
epsilon, look for delta and alpha_bar such that every sampled start in
B(x*, delta) keeps all of its first K iterates inside B(x*, epsilon) for
every tested step size alpha <= alpha_bar.  The search is truncated in
every direction (K iterations, N samples, one selection policy), so the
positive verdict is reported as "no escape observed", never as proved
stability; the negative verdict carries a replayable escape witness.

Grid cells are seeded by the (delta, alpha) values themselves, not by their
grid positions, so rerunning any sub-grid reproduces the exact same
trajectories cell for cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .catalog import CatalogFunction, as_point, evaluate, get_function
from .engine import MINIMAL_NORM, SelectionPolicy, Trajectory, derive_seed, make_rng, run, run_batch, sample_ball
from .errors import InvalidQuery, NotConvex

__all__ = [
    "StabilityQuery",
    "StabilityVerdict",
    "Certificate",
    "EscapeWitness",
    "BoundReport",
    "LocalMinCheck",
    "estimate_lipschitz",
    "default_delta_grid",
    "default_alpha_grid",
    "probe",
    "local_min_check",
    "convex_bounds_report",
]

# geometric grids bracketing the existential quantifiers
DELTA_FRACTIONS = (0.5, 0.25, 0.125, 0.0625)
ALPHA_FRACTIONS = (0.2, 0.1, 0.05, 0.01)
REPETITION_FACTOR = 50
LIPSCHITZ_SAFETY = 1.1
F_COMPARE_TOL = 1e-12


def estimate_lipschitz(fn: CatalogFunction, center, radius: float, samples: int = 256,
                       seed: int = 0) -> float:
    """1.1 times the max sampled generator norm over B(center, radius).

    Sample-max with a documented 1.1 safety factor; the center itself is
    always included in the sample.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    center = as_point(center, fn.dim)
    pts = sample_ball(center, radius, samples, make_rng(seed))
    best = 0.0
    for p in np.concatenate([center[None, :], pts], axis=0):
        gens = fn.generators(p, 0.0)
        best = max(best, float(np.sqrt((gens * gens).sum(axis=1).max())))
    return LIPSCHITZ_SAFETY * best


def default_delta_grid(epsilon: float) -> np.ndarray:
    return epsilon * np.asarray(DELTA_FRACTIONS)


def default_alpha_grid(epsilon: float, lipschitz: float) -> np.ndarray:
    return np.asarray(ALPHA_FRACTIONS) * epsilon / lipschitz


@dataclass(frozen=True)
class StabilityQuery:
    """Probe configuration; grids default to geometric ladders when None.

    delta_grid and alpha_grid must be decreasing; every delta < epsilon.
    max_iters None selects the horizon heuristic K = ceil(T/alpha) * 50
    with T = epsilon / (3 * L_estimate) per step size.
    """

    fn_id: str
    x_star: np.ndarray
    epsilon: float
    delta_grid: tuple | None = None
    alpha_grid: tuple | None = None
    n_samples: int = 50
    max_iters: int | None = None
    policy: SelectionPolicy = MINIMAL_NORM
    seed: int = 0


@dataclass(frozen=True)
class Certificate:
    epsilon: float
    delta: float
    alpha_bar: float
    n_samples: int
    max_iters: int


@dataclass(frozen=True)
class EscapeWitness:
    """First escaping sample in (delta index, alpha index, sample index) order."""

    x0: np.ndarray
    alpha: float
    exit_index: int
    trajectory_ref: Trajectory
    delta: float
    seed: int


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of a probe: a certificate or a witness, plus the cell table."""

    status: str  # no_escape_observed | escape_witnessed
    certificate: Certificate | None
    witness: EscapeWitness | None
    escape_counts: np.ndarray  # (len(delta_grid), len(alpha_grid))
    delta_grid: np.ndarray
    alpha_grid: np.ndarray
    iters_per_alpha: np.ndarray
    lipschitz_estimate: float
    query: StabilityQuery


def _value_key(x: float) -> int:
    return int(np.float64(x).view(np.uint64))


def _validate(q: StabilityQuery, deltas: np.ndarray, alphas: np.ndarray):
    if q.epsilon <= 0:
        raise InvalidQuery("epsilon must be positive")
    if q.n_samples < 1:
        raise InvalidQuery("n_samples must be >= 1")
    if deltas.size == 0 or alphas.size == 0:
        raise InvalidQuery("grids must be nonempty")
    if np.any(deltas <= 0) or np.any(alphas <= 0):
        raise InvalidQuery("grids must be positive")
    if np.any(deltas >= q.epsilon):
        raise InvalidQuery("every delta must be < epsilon")
    if np.any(np.diff(deltas) >= 0) or np.any(np.diff(alphas) >= 0):
        raise InvalidQuery("grids must be strictly decreasing")


def probe(q: StabilityQuery) -> StabilityVerdict:
    """Grid search for a no-escape certificate, else the first escape witness.

    For each (delta, alpha) cell, N seeded starts in B(x*, delta) run up to
    the cell's iteration budget with exit checks against B(x*, epsilon).
    The certificate is the first (largest) (delta, alpha_bar) whose cells
    are escape-free for every tested alpha <= alpha_bar; the witness is
    chosen by smallest (delta index, alpha index, sample index), making the
    verdict independent of cell execution order.
    """
    fn = get_function(q.fn_id, dim=as_point(q.x_star).shape[0])
    x_star = as_point(q.x_star, fn.dim)
    lip = estimate_lipschitz(fn, x_star, q.epsilon, seed=derive_seed(q.seed, 0x11F))
    deltas = np.asarray(q.delta_grid, float) if q.delta_grid is not None else default_delta_grid(q.epsilon)
    alphas = np.asarray(q.alpha_grid, float) if q.alpha_grid is not None else default_alpha_grid(q.epsilon, lip)
    _validate(q, deltas, alphas)

    horizon = q.epsilon / (3.0 * lip)
    if q.max_iters is not None:
        iters = np.full(alphas.size, int(q.max_iters), dtype=np.int64)
    else:
        iters = np.array([int(np.ceil(horizon / a)) * REPETITION_FACTOR for a in alphas], dtype=np.int64)

    counts = np.zeros((deltas.size, alphas.size), dtype=np.int64)
    first_escape = {}  # (d_idx, a_idx) -> (sample_idx, exit_idx, x0)
    for d_idx, delta in enumerate(deltas):
        for a_idx, alpha in enumerate(alphas):
            cell_seed = derive_seed(q.seed, _value_key(delta), _value_key(alpha))
            x0s = sample_ball(x_star, float(delta), q.n_samples, make_rng(cell_seed))
            k_max = int(iters[a_idx])
            if q.policy.kind == "minimal_norm":
                exit_idx, _ = run_batch(fn, x0s, float(alpha), k_max, x_star, q.epsilon)
            else:
                exit_idx = np.full(q.n_samples, -1, dtype=np.int64)
                for i in range(q.n_samples):
                    traj = run(fn, x0s[i], float(alpha), k_max, q.policy,
                               seed=derive_seed(q.seed, _value_key(delta), _value_key(alpha), i),
                               stop=(x_star, q.epsilon))
                    hit = engine.first_exit(traj, x_star, q.epsilon)
                    exit_idx[i] = -1 if hit is None else hit
            escaped = np.flatnonzero(exit_idx >= 0)
            counts[d_idx, a_idx] = escaped.size
            if escaped.size:
                i = int(escaped[0])
                first_escape[(d_idx, a_idx)] = (i, int(exit_idx[i]), x0s[i])

    for d_idx in range(deltas.size):
        for a_idx in range(alphas.size):
            if np.all(counts[d_idx, a_idx:] == 0):
                cert = Certificate(
                    epsilon=float(q.epsilon),
                    delta=float(deltas[d_idx]),
                    alpha_bar=float(alphas[a_idx]),
                    n_samples=q.n_samples,
                    max_iters=int(iters[a_idx:].max()),
                )
                return StabilityVerdict("no_escape_observed", cert, None, counts,
                                        deltas, alphas, iters, lip, q)

    d_idx, a_idx = min(first_escape)
    sample_idx, exit_idx, x0 = first_escape[(d_idx, a_idx)]
    alpha = float(alphas[a_idx])
    traj_seed = derive_seed(q.seed, _value_key(deltas[d_idx]), _value_key(alpha), sample_idx)
    traj = run(fn, x0, alpha, exit_idx, q.policy, seed=traj_seed)
    witness = EscapeWitness(x0=x0, alpha=alpha, exit_index=exit_idx, trajectory_ref=traj,
                            delta=float(deltas[d_idx]), seed=traj_seed)
    return StabilityVerdict("escape_witnessed", None, witness, counts,
                            deltas, alphas, iters, lip, q)


@dataclass(frozen=True)
class LocalMinCheck:
    status: str  # consistent_with_local_min | counterexample_point
    counterexample: np.ndarray | None
    f_center: float


def local_min_check(fn: CatalogFunction, x_star, radius: float, samples: int = 2000,
                    seed: int = 0) -> LocalMinCheck:
    """Sample B(x*, radius) for a strictly lower value than f(x*).

    The 1e-12 margin avoids float-equality traps at the center; a returned
    counterexample point certifies that x* is not a local minimum at this
    sampling resolution.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    x_star = as_point(x_star, fn.dim)
    f_center = evaluate(fn, x_star)
    pts = sample_ball(x_star, radius, samples, make_rng(seed))
    values = fn.value_many(pts)
    below = np.flatnonzero(values < f_center - F_COMPARE_TOL)
    if below.size:
        return LocalMinCheck("counterexample_point", pts[int(below[0])], f_center)
    return LocalMinCheck("consistent_with_local_min", None, f_center)


@dataclass(frozen=True)
class BoundReport:
    """Constant-step bounds for convex functions, checked on one trajectory.

    liminf_gap is estimated as the min objective gap over the tail half of
    the run; bound_c2a2 = c^2 * alpha / 2 with c the largest generator norm
    seen along the trajectory; iters_budget = floor(d(x0, X)^2 / (alpha *
    epsilon)) is the horizon within which the min-so-far gap must come
    within epsilon of the bound; dist_bound = c * sqrt(alpha) / sqrt(2 beta)
    applies when a quadratic growth constant beta is registered.
    """

    fn_id: str
    alpha: float
    c: float
    liminf_gap: float
    bound_c2a2: float
    iters_budget: int
    achieved_within_budget: bool
    terminal_distance: float
    dist_bound: float | None = None
    beta: float | None = None


def convex_bounds_report(fn: CatalogFunction, x0, alpha: float, epsilon: float,
                         n_steps: int | None = None, seed: int = 0) -> BoundReport:
    if not fn.convex:
        raise NotConvex(f"{fn.name} is not convex")
    minimizers = fn.known_minimizers
    if not minimizers:
        raise NotConvex(f"{fn.name} has no registered minimizers")
    x0 = as_point(x0, fn.dim)
    d0 = min(float(np.linalg.norm(x0 - m)) for m in minimizers)
    inf_f = min(evaluate(fn, m) for m in minimizers)
    # nudge before flooring so exact integer ratios survive float rounding
    budget = int(np.floor(d0 * d0 / (alpha * epsilon) * (1.0 + 1e-12)))
    if n_steps is None:
        n_steps = max(200, 2 * budget)
    traj = run(fn, x0, alpha, n_steps, MINIMAL_NORM, seed=seed)
    gaps = fn.value_many(traj.points) - inf_f
    c = 0.0
    for p in traj.points:
        gens = fn.generators(p, 0.0)
        c = max(c, float(np.sqrt((gens * gens).sum(axis=1).max())))
    bound = c * c * alpha / 2.0
    tail = gaps[gaps.shape[0] // 2:]
    min_to_budget = float(gaps[: budget + 1].min()) if budget >= 0 else float(gaps[0])
    terminal = min(float(np.linalg.norm(traj.points[-1] - m)) for m in minimizers)
    beta = fn.quad_growth
    dist_bound = None
    if beta is not None and alpha <= 1.0 / (2.0 * beta):
        dist_bound = c * float(np.sqrt(alpha)) / float(np.sqrt(2.0 * beta))
    return BoundReport(
        fn_id=fn.name,
        alpha=float(alpha),
        c=c,
        liminf_gap=float(tail.min()),
        bound_c2a2=bound,
        iters_budget=budget,
        achieved_within_budget=bool(min_to_budget <= bound + epsilon),
        terminal_distance=terminal,
        dist_bound=dist_bound,
        beta=beta,
    )
