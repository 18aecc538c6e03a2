import json

import numpy as np

from nsdyn import (
    StabilityQuery,
    convex_bounds_report,
    escape_experiment,
    get_function,
    integrate_flow,
    probe,
    run,
)
from nsdyn.reporting import (
    fmt,
    flow_csv_text,
    json_text,
    per_sample_csv_text,
    trajectory_csv_text,
    write_report,
)


def test_fmt_is_shortest_roundtrip():
    for v in (0.5, 0.1, 1 / 3, 0.32805000000000006, 1e-300, -0.0):
        assert float(fmt(v)) == v
        assert len(fmt(v).replace("-", "").replace(".", "").replace("e", "").lstrip("0")) <= 17


def test_write_report_trajectory_deterministic(tmp_path):
    traj = run(get_function("quad", 1), [1.0], 0.1, 2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_report(traj, a, "csv")
    write_report(traj, b, "csv")
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().splitlines()
    assert rows[0] == "k,t,x_0,f,subgrad_norm"
    assert rows[1] == "0,0.0,1.0,0.5,1.0"
    assert rows[2].startswith("1,0.1") and ",0.9," in rows[2]


def test_write_report_zero_step_trajectory(tmp_path):
    traj = run(get_function("quad", 1), [1.0], 0.1, 0)
    out = tmp_path / "k0.csv"
    write_report(traj, out, "csv")
    assert out.read_text().splitlines() == ["k,t,x_0,f,subgrad_norm", "0,0.0,1.0,0.5,1.0"]


def test_write_report_flow_and_json(tmp_path):
    sol = integrate_flow(get_function("quad", 1), [1.0], 0.1, 0.05)
    out = tmp_path / "flow.csv"
    write_report(sol, out, "csv")
    assert out.read_text().startswith("t,x_0,f,min_norm_subgrad\n0.0,1.0,0.5,1.0\n")

    verdict = probe(StabilityQuery("quad", np.zeros(2), 0.1, delta_grid=(0.05,),
                                   alpha_grid=(0.1,), n_samples=5, max_iters=50, seed=1))
    out = tmp_path / "verdict.json"
    write_report(verdict, out, "json")
    got = json.loads(out.read_text())
    assert got["status"] == "no_escape_observed"
    assert got["certificate"]["delta"] == 0.05
    assert got["escape_counts"] == [[0]]

    rep = convex_bounds_report(get_function("quad", 1), [1.0], 0.5, 0.1, n_steps=50)
    out = tmp_path / "bounds.json"
    write_report(rep, out, "json")
    assert json.loads(out.read_text())["beta"] == 0.5

    stats, per_sample = escape_experiment(0.25, 0.3, 20, k_max=1000, seed=1)
    out = tmp_path / "stats.json"
    write_report(stats, out, "json")
    got = json.loads(out.read_text())
    assert set(got) == {"epsilon", "alpha", "N", "K_max", "seed", "escaped_count",
                        "max_exit_index", "stuck_on_S_count", "non_escaped_offS_count"}
    table = per_sample_csv_text(per_sample)
    assert table.splitlines()[0] == "sample,x1_0,x2_0,exit_index,on_S"
    assert len(table.splitlines()) == 21


def test_csv_line_endings_are_lf(tmp_path):
    traj = run(get_function("cross"), [1.0, 0.1], 0.1, 5)
    out = tmp_path / "t.csv"
    write_report(traj, out, "csv")
    raw = out.read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"\n")


def test_final_row_reports_min_norm_element():
    traj = run(get_function("abs_sum", 1), [0.25], 0.1, 3)
    rows = trajectory_csv_text(traj).splitlines()
    # last point after 3 steps is -0.05; its selected subgradient norm is 1
    assert rows[-1].split(",")[-1] == "1.0"
    sol = integrate_flow(get_function("abs_sum", 1), [0.25], 0.3, 0.1)
    assert flow_csv_text(sol).splitlines()[-1].split(",")[-1] == "1.0"


def test_json_text_sorts_keys_and_keeps_bools():
    text = json_text({"b": True, "a": np.float64(0.5), "c": np.arange(2)})
    assert text == '{\n  "a": 0.5,\n  "b": true,\n  "c": [\n    0,\n    1\n  ]\n}\n'
