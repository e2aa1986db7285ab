import math
import os
import subprocess
import sys
import tempfile

import pytest

try:
    import dykstra_net
except ImportError:
    dykstra_net = None

needs_module = pytest.mark.skipif(
    dykstra_net is None, reason="dykstra_net extension not installed"
)

CONFIG = """\
[graph]
n = 5
edges = 0-1,1-2,2-3,3-4
x0 = 1;2;3;4;5
[run]
max_cycles = 500
gap_tol = 1e-18
"""


@needs_module
def test_consensus_mean():
    res = dykstra_net.solve_consensus(
        n=5,
        edges=[(0, 1), (1, 2), (2, 3), (3, 4)],
        x0=[[1.0], [2.0], [3.0], [4.0], [5.0]],
        funcs=["zero"] * 5,
        max_cycles=500,
        gap_tol=1e-18,
    )
    for block in res["x"]:
        assert abs(block[0] - 3.0) < 1e-9
    assert res["gap_lb"] <= 1e-18


@needs_module
def test_oracle_matches_solver():
    x0 = [[0.5, -1.0], [1.5, 2.0], [-0.5, 0.0]]
    funcs = ["quadratic a=1 c=0,0", "zero", "box lo=-1,-1 hi=1,1"]
    ref = dykstra_net.oracle(x0, funcs)
    res = dykstra_net.solve_consensus(
        n=3, edges=[(0, 1), (1, 2)], x0=x0, funcs=funcs,
        max_cycles=5000, gap_tol=1e-20,
    )
    err = max(
        abs(a - b) for ra, rb in zip(res["x"], ref) for a, b in zip(ra, rb)
    )
    assert err < 1e-6


@needs_module
def test_convex_function_prox():
    f = dykstra_net.ConvexFunction.parse("l1 lambda=1", 1)
    assert f.prox(1.0, [3.0]) == [2.0]
    assert f.prox(1.0, [0.5]) == [0.0]
    assert f.eval([2.0]) == 2.0


@needs_module
def test_allocation_stuck_and_escape():
    funcs = ["quadratic a=1 c=-1", "zero", "quadratic a=1 c=1"]
    stuck = dykstra_net.solve_allocation(funcs, 1, [[0, 1], [1, 2]])
    assert stuck["suspect_stuck"]
    full = dykstra_net.solve_allocation(funcs, 1, [[0, 1, 2]])
    assert not full["suspect_stuck"]
    assert abs(full["G"] + 1.0) < 1e-12
    x, y = dykstra_net.oracle_allocation(funcs, 1)
    assert abs(x[0]) < 1e-10
    assert abs(sum(v[0] for v in y)) < 1e-10


@needs_module
def test_apg_reaches_consensus_value():
    res = dykstra_net.solve_apg(
        n=3, edges=[(0, 1), (1, 2)],
        x0=[[1.0], [2.0], [3.0]], funcs=["zero"] * 3, max_iters=3000,
    )
    # Optimal F is 1 for this instance; the column tracks min of -F.
    assert res["best_neg_F"] <= -1.0 + 1e-6
    gaps = [row["gap_lb"] for row in res["trace"]]
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))


def test_cli_run_and_oracle():
    cli = os.environ.get("DYKSTRA_NET_CLI")
    if cli is None or not os.path.exists(cli):
        pytest.skip("DYKSTRA_NET_CLI not set")
    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "exp.ini")
        out = os.path.join(tmp, "trace.csv")
        with open(cfg, "w") as fh:
            fh.write(CONFIG)
        proc = subprocess.run(
            [cli, "run", "--config", cfg, "--out", out],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        with open(out) as fh:
            header = fh.readline().strip()
        assert header == "iter,F,gap_lb,dist_ref,sumz_sqrtn,wall_ns"

        proc = subprocess.run(
            [cli, "oracle", "--config", cfg], capture_output=True, text=True
        )
        assert proc.returncode == 0, proc.stderr
        # Output looks like: x* = (3) (consensus over 5 vertices)
        inner = proc.stdout.split("(")[1].split(")")[0]
        values = [float(v) for v in inner.split(",")]
        assert values and all(math.isclose(v, 3.0, abs_tol=1e-8) for v in values)


def test_cli_bad_config_exit_64():
    cli = os.environ.get("DYKSTRA_NET_CLI")
    if cli is None or not os.path.exists(cli):
        pytest.skip("DYKSTRA_NET_CLI not set")
    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "bad.ini")
        with open(cfg, "w") as fh:
            fh.write("[graph]\nedges 0-1\n")
        proc = subprocess.run(
            [cli, "run", "--config", cfg], capture_output=True, text=True
        )
        assert proc.returncode == 64


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
