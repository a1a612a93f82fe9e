import json
import math
import os
import subprocess

import numpy as np
import pytest

import obstlab


@pytest.fixture(scope="module")
def iso():
    sol, _ = obstlab.construct(obstlab.Blowdown.preset("isotropic"))
    return sol


def test_ball_potential_matches_closed_form():
    for n in range(3, 9):
        ball = obstlab.Ellipsoid.ball(n, 1.0)
        assert ball.potential(np.zeros(n)) == pytest.approx(1.0 / (2 * (n - 2)), rel=1e-12)
        q, _ = ball.interior_coefficients()
        assert np.allclose(q, 1.0 / (2 * n), rtol=1e-12)


def test_newton_constant():
    # |B_1| in R^3 is 4 pi / 3
    assert obstlab.newton_constant(3) == pytest.approx(1.0 / (3 * 4 * math.pi / 3))


def test_construct_and_solution(iso):
    par = iso.paraboloid
    assert par.isotropic()
    assert par.sectional_semiaxes == pytest.approx([math.sqrt(6)] * 5)
    x = np.array([3.0, 0, 0, 0, 0, 3.5])
    assert iso.value(x) > 0
    assert np.trace(iso.hessian(x)) == pytest.approx(1.0, abs=1e-6)
    inside = np.array([0, 0, 0, 0, 0, 5.0])
    assert abs(iso.value(inside)) < 1e-10


def test_construct_report():
    _, rep = obstlab.construct(obstlab.Blowdown.preset("anisotropic"), report=True)
    assert all(t["identity_error"] < 1e-6 for t in rep["terms"])


def test_paraboloid_potential_methods(iso):
    x = [3.0, 0, 0, 0, 0, 3.5]
    closed = iso.paraboloid.potential(x)
    seq = iso.paraboloid.potential(x, method="sequence", tol=1e-5)
    assert seq["potential"] == pytest.approx(closed["potential"], abs=1e-5)
    mc = iso.paraboloid.potential_montecarlo(x, samples=100000, seed=3)
    assert abs(mc["potential"] - closed["potential"]) < 4 * mc["stderr"] + mc["tail_bound"]


def test_solve_and_grid(iso):
    g = obstlab.solve_paraboloid(iso, 1.0 / 16)
    assert g.u.shape == (g.nz, g.nr)
    assert (g.u >= 0).all()
    assert g.complementarity_residual() <= 1e-6
    z = g.z[g.nz // 2 + 4]
    x = np.zeros(6)
    x[5] = z
    assert g.interpolate(0.0, z) == pytest.approx(iso.value(x), abs=1e-3)


def test_solve_python_boundary():
    g = obstlab.solve(6, lambda rho, z: (rho**2 + z**2) / 12 + 1, R=1.0, z0=-1.0, z1=1.0, h=0.125)
    assert g.interpolate(0.5, 0.5) == pytest.approx(0.5 / 12 + 1, abs=1e-8)


def test_diagnostics(iso):
    rep = obstlab.frequency(iso, [0.5, 1.0, 2.0])
    f = [v["F1"] for v in rep["values"]]
    assert f == sorted(f) and max(f) < 0
    phis = [obstlab.acf(iso, 0, r)["phi"] for r in (0.5, 1.0)]
    assert phis[1] >= phis[0]
    rows = obstlab.hele_shaw(iso)
    assert len(rows) == 5 and min(r["ratio"] for r in rows) >= 3
    d = obstlab.decay_scan(iso.paraboloid, 0.35, [1e2, 1e3])
    assert d["edge_decreasing"]


def test_errors_are_raised():
    with pytest.raises(obstlab.ObstlabError) as e:
        obstlab.construct(obstlab.Blowdown([0.125] * 4, 1.0))
    assert json.loads(str(e.value))["error"] == "unsupported-dimension"


cli = os.environ.get("OBSTLAB_CLI")


@pytest.mark.skipif(not cli, reason="CLI path not provided")
@pytest.mark.parametrize(
    "args,code",
    [
        (["construct"], 0),
        (["potential", "--at", "1,2"], 2),
        (["potential", "--at", "3,0,0,0,0,3.5", "--method", "monte-carlo"], 2),
        (["verify", "--suite", "nope"], 2),
        (["solve", "--omega", "2.5"], 2),
        (["verify", "--N", "5"], 3),
        (["heleshaw", "--cells", "4"], 0),
    ],
)
def test_cli_exit_codes(args, code):
    r = subprocess.run([cli, *args], capture_output=True, text=True)
    assert r.returncode == code, r.stderr
    if code == 2:
        assert "path" in json.loads(r.stderr)


@pytest.mark.skipif(not cli, reason="CLI path not provided")
def test_cli_output_is_byte_stable(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        subprocess.run([cli, "verify", "--suite", "decay", "--out", str(d)], check=True, capture_output=True)
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    header = outs[0]["decay.csv"].decode().splitlines()[0]
    assert header.startswith("k[length;tol=")
