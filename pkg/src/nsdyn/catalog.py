"""Locally Lipschitz test functions with exact subdifferential oracles.

Every catalog function provides its closed-form value and the exact
generator representation of its Clarke subdifferential: the subdifferential
at a point is the convex hull of finitely many generator vectors (a single
generator wherever the function is differentiable, the extreme limiting
gradients at kinks).  A vectorized minimal-norm selection field backs the
batch dynamics engines and is kept bit-identical to the scalar oracle.

Catalog:

    quad      0.5 * ||x||^2          smooth, convex, minimizer 0, any dim
    abs_sum   sum_i |x_i|            sharp strict minimum at 0, convex, any dim
    cross     |x1|^1.5 * |x2|^1.5    C^1 but not C^1,1; every point of the
                                     axis set {x1*x2 = 0} is a non-strict
                                     local minimum
    wiggle    x^2 sin(1/x), f(0)=0   differentiable with f'(0)=0 but not
                                     strictly differentiable at 0; the only
                                     non-semialgebraic entry
    vee_bowl  |x1| + x2^2            strict minimum at 0 mixing a kink with
                                     smooth curvature, convex
    neg_norm  -||x||                 strict maximum at 0; negative control
                                     (0 is not a local minimum)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonFiniteInput

__all__ = [
    "CatalogFunction",
    "SubdifferentialSet",
    "evaluate",
    "subdifferential",
    "minimal_norm_element",
    "hull_distance",
    "list_catalog",
    "get_function",
    "CATALOG_IDS",
]

MIN_NORM_TOL = 1e-12


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a 1-D float64 array, optionally checking the dimension."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D point, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected dim {dim}, got {v.shape[0]}")
    return v


@dataclass(frozen=True)
class SubdifferentialSet:
    """Clarke subdifferential at ``point`` as the hull of ``generators``.

    generators has shape (m, dim) with no duplicate rows; the subdifferential
    is exactly conv(generators) for every catalog function.
    """

    generators: np.ndarray
    point: np.ndarray

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.generators, dtype=float))
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "point", as_point(self.point, g.shape[1]))

    @property
    def dim(self) -> int:
        return self.generators.shape[1]


class CatalogFunction:
    """Base class: closed-form value plus exact generator oracle."""

    name: str
    semialgebraic: bool = True
    convex: bool = False
    any_dim: bool = False
    quad_growth: float | None = None  # beta with f(x) - inf f >= beta * d(x, X)^2

    def __init__(self, dim: int):
        if dim < 1:
            raise DimensionMismatch("dim must be a positive integer")
        self.dim = int(dim)

    # known minimizers; nonempty for every convex entry
    @property
    def known_minimizers(self) -> list[np.ndarray]:
        return []

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def value_many(self, pts: np.ndarray) -> np.ndarray:
        return np.array([self.value(p) for p in pts])

    def generators(self, x: np.ndarray, active_tol: float = 0.0) -> np.ndarray:
        """Generator rows of the Clarke subdifferential at ``x``."""
        raise NotImplementedError

    def min_norm_many(self, pts: np.ndarray) -> np.ndarray:
        """Minimal-norm subgradient at each row of ``pts`` (closed form)."""
        raise NotImplementedError

    def describe(self) -> dict:
        return {
            "id": self.name,
            "dim": self.dim,
            "semialgebraic": self.semialgebraic,
            "convex": self.convex,
        }

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class Quad(CatalogFunction):
    """f(x) = 0.5 * ||x||^2, gradient x."""

    name = "quad"
    convex = True
    any_dim = True
    quad_growth = 0.5

    @property
    def known_minimizers(self):
        return [np.zeros(self.dim)]

    def value(self, x):
        x = as_point(x, self.dim)
        return 0.5 * float(x @ x)

    def value_many(self, pts):
        return 0.5 * np.einsum("ij,ij->i", pts, pts)

    def generators(self, x, active_tol=0.0):
        return as_point(x, self.dim)[None, :].copy()

    def min_norm_many(self, pts):
        return pts.copy()


class AbsSum(CatalogFunction):
    """f(x) = ||x||_1.

    At a point with active coordinates A = {i : |x_i| <= active_tol} the
    subdifferential is {g : g_i = sign(x_i) off A, g_i in [-1, 1] on A};
    the generators are the 2^|A| sign choices on A.
    """

    name = "abs_sum"
    convex = True
    any_dim = True

    @property
    def known_minimizers(self):
        return [np.zeros(self.dim)]

    def value(self, x):
        x = as_point(x, self.dim)
        return float(np.sum(np.abs(x)))

    def value_many(self, pts):
        return np.sum(np.abs(pts), axis=1)

    def generators(self, x, active_tol=0.0):
        x = as_point(x, self.dim)
        active = np.flatnonzero(np.abs(x) <= active_tol)
        base = np.sign(x)
        if active.size == 0:
            return base[None, :]
        gens = np.repeat(base[None, :], 2 ** active.size, axis=0)
        for row, signs in enumerate(itertools.product((-1.0, 1.0), repeat=active.size)):
            gens[row, active] = signs
        return gens

    def min_norm_many(self, pts):
        return np.sign(pts)


def _cross_grad(x1, x2):
    # shared by the scalar generator oracle and the batch field so that
    # both produce bit-identical selections
    a1 = np.abs(x1)
    a2 = np.abs(x2)
    g1 = 1.5 * np.sqrt(a1) * a2 * np.sqrt(a2) * np.sign(x1)
    g2 = 1.5 * a1 * np.sqrt(a1) * np.sqrt(a2) * np.sign(x2)
    return g1, g2


class Cross(CatalogFunction):
    """f(x1, x2) = |x1|^1.5 * |x2|^1.5.

    Continuously differentiable (both partials carry a vanishing factor on
    the axes), so the subdifferential is a singleton everywhere; the
    gradient is not locally Lipschitz near the axis set, which is what
    decouples the discrete dynamics from the flow.  Every axis point is a
    critical non-strict local minimum.
    """

    name = "cross"

    def __init__(self, dim: int = 2):
        if dim != 2:
            raise DimensionMismatch("cross is defined on R^2")
        super().__init__(2)

    def value(self, x):
        x = as_point(x, 2)
        a1, a2 = np.abs(x)
        return float(a1 ** 1.5 * a2 ** 1.5)

    def value_many(self, pts):
        a = np.abs(pts)
        return a[:, 0] ** 1.5 * a[:, 1] ** 1.5

    def generators(self, x, active_tol=0.0):
        x = as_point(x, 2)
        g1, g2 = _cross_grad(x[0], x[1])
        return np.array([[g1, g2]])

    def min_norm_many(self, pts):
        g1, g2 = _cross_grad(pts[:, 0], pts[:, 1])
        return np.stack([g1, g2], axis=1)


class Wiggle(CatalogFunction):
    """f(x) = x^2 sin(1/x) with f(0) = 0, on R.

    Differentiable everywhere with f'(0) = 0, but the limiting gradients at
    0 fill [-1, 1] (the -cos(1/x) term), so the Clarke subdifferential at 0
    is [-1, 1] with extreme generators -1 and +1.  Not semialgebraic.
    """

    name = "wiggle"
    semialgebraic = False

    def __init__(self, dim: int = 1):
        if dim != 1:
            raise DimensionMismatch("wiggle is defined on R")
        super().__init__(1)

    def value(self, x):
        x = as_point(x, 1)
        t = x[0]
        if t == 0.0:
            return 0.0
        return float(t * t * np.sin(1.0 / t))

    def value_many(self, pts):
        t = pts[:, 0]
        out = np.zeros_like(t)
        nz = t != 0.0
        out[nz] = t[nz] * t[nz] * np.sin(1.0 / t[nz])
        return out

    def generators(self, x, active_tol=0.0):
        x = as_point(x, 1)
        t = x[0]
        if np.abs(t) <= active_tol:
            return np.array([[-1.0], [1.0]])
        return np.array([[2.0 * t * np.sin(1.0 / t) - np.cos(1.0 / t)]])

    def min_norm_many(self, pts):
        t = pts[:, 0]
        out = np.zeros_like(t)
        nz = t != 0.0
        out[nz] = 2.0 * t[nz] * np.sin(1.0 / t[nz]) - np.cos(1.0 / t[nz])
        return out[:, None]


class VeeBowl(CatalogFunction):
    """f(x1, x2) = |x1| + x2^2; strict minimum at the origin."""

    name = "vee_bowl"
    convex = True

    def __init__(self, dim: int = 2):
        if dim != 2:
            raise DimensionMismatch("vee_bowl is defined on R^2")
        super().__init__(2)

    @property
    def known_minimizers(self):
        return [np.zeros(2)]

    def value(self, x):
        x = as_point(x, 2)
        return float(np.abs(x[0]) + x[1] * x[1])

    def value_many(self, pts):
        return np.abs(pts[:, 0]) + pts[:, 1] * pts[:, 1]

    def generators(self, x, active_tol=0.0):
        x = as_point(x, 2)
        d2 = 2.0 * x[1]
        if np.abs(x[0]) <= active_tol:
            return np.array([[-1.0, d2], [1.0, d2]])
        return np.array([[np.sign(x[0]), d2]])

    def min_norm_many(self, pts):
        return np.stack([np.sign(pts[:, 0]), 2.0 * pts[:, 1]], axis=1)


class NegNorm(CatalogFunction):
    """f(x) = -||x||; gradient -x/||x|| away from 0.

    The true Clarke subdifferential at 0 is the whole unit ball; the finite
    generator list there is the cross-polytope {+-e_i}, a sub-polytope that
    still contains the minimal-norm element 0.  Trajectories never hit 0
    exactly under continuous sampling, so the approximation is inert.
    """

    name = "neg_norm"
    any_dim = True

    def value(self, x):
        x = as_point(x, self.dim)
        return -float(np.sqrt(x @ x))

    def value_many(self, pts):
        return -np.sqrt(np.einsum("ij,ij->i", pts, pts))

    def generators(self, x, active_tol=0.0):
        x = as_point(x, self.dim)
        r = np.sqrt((x * x).sum())
        if r <= active_tol:
            eye = np.eye(self.dim)
            return np.concatenate([eye, -eye], axis=0)
        return (-x / r)[None, :]

    def min_norm_many(self, pts):
        r = np.sqrt((pts * pts).sum(axis=1))
        safe = np.where(r > 0.0, r, 1.0)
        return np.where(r[:, None] > 0.0, -pts / safe[:, None], 0.0)


_FLEX = {"quad": Quad, "abs_sum": AbsSum, "neg_norm": NegNorm}
_FIXED = {"cross": Cross, "wiggle": Wiggle, "vee_bowl": VeeBowl}
CATALOG_IDS = ("quad", "abs_sum", "cross", "wiggle", "vee_bowl", "neg_norm")


def get_function(name: str, dim: int | None = None) -> CatalogFunction:
    """Instantiate a catalog function, inferring a default dimension.

    quad, abs_sum and neg_norm accept any dim >= 1 (default 2); the others
    have fixed dimensions.
    """
    if name in _FLEX:
        return _FLEX[name](2 if dim is None else dim)
    if name in _FIXED:
        fn = _FIXED[name]()
        if dim is not None and dim != fn.dim:
            raise DimensionMismatch(f"{name} is defined on R^{fn.dim}")
        return fn
    raise KeyError(f"unknown catalog function {name!r}; known: {', '.join(CATALOG_IDS)}")


def list_catalog() -> list[CatalogFunction]:
    """All six catalog entries at their default dimensions."""
    return [get_function(name) for name in CATALOG_IDS]


def evaluate(fn: CatalogFunction, x) -> float:
    """Closed-form function value; rejects wrong dims and non-finite input."""
    x = as_point(x, fn.dim)
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput(f"non-finite input {x}")
    return fn.value(x)


def subdifferential(fn: CatalogFunction, x, active_tol: float = 0.0) -> SubdifferentialSet:
    """Exact Clarke subdifferential at ``x`` as a generator set.

    A kink is treated as active when its defining quantity has magnitude
    <= active_tol; with active_tol = 0 the set is exact at the given
    floating-point location.
    """
    if active_tol < 0:
        raise ValueError("active_tol must be nonnegative")
    x = as_point(x, fn.dim)
    return SubdifferentialSet(fn.generators(x, active_tol), x)


def _segment_min_norm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return a.copy()
    t = -float(a @ d) / dd
    t = min(1.0, max(0.0, t))
    return a + t * d


def _affine_min_norm(pts: np.ndarray) -> np.ndarray:
    # weights of the min-norm point of the affine hull of the rows
    m = pts.shape[0]
    gram = pts @ pts.T
    lhs = np.zeros((m + 1, m + 1))
    lhs[:m, :m] = gram
    lhs[:m, m] = 1.0
    lhs[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    sol = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    return sol[:m]


def minimal_norm_element(sub) -> np.ndarray:
    """argmin{||v|| : v in conv(generators)}.

    Exact segment projection for up to two generators; Wolfe's minimum-norm
    point iteration (tolerance 1e-12, iteration cap 10*m^2) beyond that.
    Accepts a SubdifferentialSet or a raw (m, dim) array.
    """
    gens = sub.generators if isinstance(sub, SubdifferentialSet) else np.atleast_2d(np.asarray(sub, float))
    m = gens.shape[0]
    if m == 0:
        raise ValueError("empty generator set")
    if m == 1:
        return gens[0].copy()
    if m == 2:
        return _segment_min_norm(gens[0], gens[1])
    return _wolfe_min_norm(gens)


def _wolfe_min_norm(gens: np.ndarray, tol: float = MIN_NORM_TOL) -> np.ndarray:
    m = gens.shape[0]
    norms2 = np.einsum("ij,ij->i", gens, gens)
    corral = [int(np.argmin(norms2))]
    weights = np.array([1.0])
    x = gens[corral[0]].copy()
    scale = max(1.0, float(np.max(norms2)))
    for _ in range(10 * m * m):
        dots = gens @ x
        j = int(np.argmin(dots))
        if dots[j] >= float(x @ x) - tol * scale:
            break
        if j in corral:
            break
        corral.append(j)
        weights = np.append(weights, 0.0)
        # minor cycle: pull the affine solution back into the simplex
        while True:
            pts = gens[corral]
            v = _affine_min_norm(pts)
            if np.all(v > tol):
                weights = v
                break
            # largest feasible move from weights toward v
            shrink = weights - v
            mask = shrink > tol
            if not np.any(mask):
                weights = np.clip(v, 0.0, None)
                s = weights.sum()
                if s > 0:
                    weights = weights / s
                break
            theta = np.min(weights[mask] / shrink[mask])
            theta = min(1.0, theta)
            weights = (1.0 - theta) * weights + theta * v
            weights[weights < tol] = 0.0
            keep = weights > 0.0
            if keep.all():
                weights = weights / weights.sum()
                break
            corral = [c for c, k in zip(corral, keep) if k]
            weights = weights[keep]
            weights = weights / weights.sum()
        x = weights @ gens[corral]
        if float(x @ x) <= tol * tol:
            x = np.zeros(gens.shape[1])
            break
    return x


def hull_distance(sub, v) -> float:
    """Distance from ``v`` to conv(generators); 0 means hull membership."""
    gens = sub.generators if isinstance(sub, SubdifferentialSet) else np.atleast_2d(np.asarray(sub, float))
    shifted = gens - np.asarray(v, float)[None, :]
    return float(np.linalg.norm(minimal_norm_element(shifted)))
