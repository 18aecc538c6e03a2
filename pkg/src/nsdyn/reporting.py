"""Bit-stable CSV/JSON emission for trajectories, flows and probe reports.

All reals are printed with Python's shortest round-trip representation
(at most 17 significant digits), keys are sorted, and line endings are LF,
so regenerating any artifact from the same inputs is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import asdict, is_dataclass

import numpy as np

from .catalog import CatalogFunction, get_function, list_catalog, minimal_norm_element
from .counterexample import EscapeStats
from .engine import SelectionPolicy, Trajectory
from .flow import FlowSolution
from .stability import BoundReport, StabilityQuery, StabilityVerdict

__all__ = [
    "fmt",
    "trajectory_csv_text",
    "flow_csv_text",
    "per_sample_csv_text",
    "json_text",
    "write_text",
    "write_report",
    "verdict_json_dict",
    "catalog_json_list",
    "policy_json",
]


def fmt(v) -> str:
    """Shortest round-trip decimal for one real."""
    return repr(float(v))


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else
                              str(cell) if isinstance(cell, (int, np.integer)) else fmt(cell)
                              for cell in row))
    return "\n".join(lines) + "\n"


def trajectory_csv_text(traj: Trajectory, fn: CatalogFunction | None = None) -> str:
    """One row per iterate: k, t, coordinates, f, subgrad_norm.

    subgrad_norm on row k is the norm of the subgradient chosen at x_k; the
    final row, which has no executed step, reports the norm of the
    minimal-norm element at the last point.
    """
    fn = fn if fn is not None else get_function(traj.fn_id, dim=traj.dim)
    header = ["k", "t"] + [f"x_{i}" for i in range(traj.dim)] + ["f", "subgrad_norm"]
    rows = []
    n = traj.points.shape[0]
    for k in range(n):
        x = traj.points[k]
        if k < traj.n_steps:
            s = traj.chosen_subgradients[k]
        else:
            s = minimal_norm_element(fn.generators(x, 0.0))
        rows.append([k, traj.alpha * k, *x, fn.value(x), float(np.linalg.norm(s))])
    return _csv(header, rows)


def flow_csv_text(sol: FlowSolution) -> str:
    """One row per node: t, coordinates, f, min_norm_subgrad (its norm)."""
    header = ["t"] + [f"x_{i}" for i in range(sol.dim)] + ["f", "min_norm_subgrad"]
    norms = np.sqrt((sol.min_norm_subgrads * sol.min_norm_subgrads).sum(axis=1))
    rows = [[sol.ts[j], *sol.xs[j], sol.f_values[j], norms[j]] for j in range(sol.ts.shape[0])]
    return _csv(header, rows)


def per_sample_csv_text(per_sample: np.ndarray) -> str:
    """Escape-experiment sample table: index, start, exit index, axis flag."""
    header = ["sample", "x1_0", "x2_0", "exit_index", "on_S"]
    rows = [[i, row["x1_0"], row["x2_0"], int(row["exit_index"]), int(row["on_S"])]
            for i, row in enumerate(per_sample)]
    return _csv(header, rows)


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if is_dataclass(obj):
        return {k: _plain(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def json_text(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def write_text(path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def policy_json(policy: SelectionPolicy) -> dict:
    return {"kind": policy.kind, "index": policy.index}


def _query_json(q: StabilityQuery) -> dict:
    return {
        "fn_id": q.fn_id,
        "x_star": _plain(np.asarray(q.x_star, float)),
        "epsilon": q.epsilon,
        "delta_grid": None if q.delta_grid is None else _plain(np.asarray(q.delta_grid, float)),
        "alpha_grid": None if q.alpha_grid is None else _plain(np.asarray(q.alpha_grid, float)),
        "n_samples": q.n_samples,
        "max_iters": q.max_iters,
        "policy": policy_json(q.policy),
        "seed": q.seed,
    }


def verdict_json_dict(verdict: StabilityVerdict, witness_csv: str | None = None) -> dict:
    """Probe report: query, verdict, per-cell escape counts, Lipschitz estimate.

    A positive verdict is only ever an observation at the recorded budgets
    and policy, so the status string keeps the word "observed".
    """
    out = {
        "query": _query_json(verdict.query),
        "status": verdict.status,
        "delta_grid": _plain(verdict.delta_grid),
        "alpha_grid": _plain(verdict.alpha_grid),
        "iters_per_alpha": _plain(verdict.iters_per_alpha),
        "escape_counts": _plain(verdict.escape_counts),
        "lipschitz_estimate": float(verdict.lipschitz_estimate),
    }
    if verdict.certificate is not None:
        out["certificate"] = _plain(verdict.certificate)
    if verdict.witness is not None:
        w = verdict.witness
        out["witness"] = {
            "x0": _plain(w.x0),
            "alpha": w.alpha,
            "exit_index": w.exit_index,
            "delta": w.delta,
            "seed": w.seed,
        }
        if witness_csv is not None:
            out["witness"]["trajectory_csv"] = witness_csv
    return out


def catalog_json_list() -> list[dict]:
    return [fn.describe() for fn in list_catalog()]


def write_report(result, path, fmt_kind: str):
    """Write one result deterministically; fmt_kind is "csv" or "json"."""
    if fmt_kind == "csv":
        if isinstance(result, Trajectory):
            write_text(path, trajectory_csv_text(result))
        elif isinstance(result, FlowSolution):
            write_text(path, flow_csv_text(result))
        elif isinstance(result, np.ndarray):
            write_text(path, per_sample_csv_text(result))
        else:
            raise TypeError(f"no CSV form for {type(result).__name__}")
        return
    if fmt_kind == "json":
        if isinstance(result, StabilityVerdict):
            write_text(path, json_text(verdict_json_dict(result)))
        elif isinstance(result, EscapeStats):
            write_text(path, json_text(result.to_json_dict()))
        elif isinstance(result, (dict, list, BoundReport)):
            write_text(path, json_text(result))
        else:
            write_text(path, json_text(_plain(result)))
        return
    raise ValueError(f"unknown format {fmt_kind!r}")
