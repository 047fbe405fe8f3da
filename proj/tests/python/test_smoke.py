import math

import pytest

import rdsm


def test_volume_and_perimeter():
    tri = [[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]]
    assert rdsm.volume(tri) == pytest.approx(6.0)
    assert rdsm.perimeter(tri) == pytest.approx(12.0)


def test_long_thin_triangle_is_edge_degenerate():
    r = rdsm.detect_degeneracy([[0, 0], [1000, 0], [0, 1]], 0.1, 0.1)
    assert r.classification == "edge"
    assert r.edge_degenerate and not r.volume_degenerate


def test_correction_keeps_perimeter():
    tri = [[0.0, 0.0], [1.0, 0.0], [2.0, 1e-3]]
    fixed = rdsm.correct_degeneracy(tri, [0.3, 0.1, 0.9])
    assert fixed.moved == [2]
    assert rdsm.perimeter(fixed.vertices) == pytest.approx(rdsm.perimeter(tri), rel=1e-10)
    assert rdsm.volume(fixed.vertices) > rdsm.volume(tri)


def test_dsm_run_reaches_corner():
    r = rdsm.run("dsm", "linear-gradient", [-0.75, 0.35], max_iter=50, max_eval=100)
    assert abs(r.best_point[0] - 1.0) < 0.05
    assert abs(r.best_point[1] + 1.0) < 0.05
    assert r.total_evaluations <= 100
    assert r.operations[0] in {"reflection", "expansion"}
    assert r.simplex_history().startswith("iter\tsimplex_id\tvertex_ids\toperation\tcounters\n")


def test_rdsm_passes_obstacle(tmp_path):
    r = rdsm.run("rdsm", "linear-gradient-obstacle", [-0.75, 0.35], max_iter=50, max_eval=100)
    assert r.best_cost <= 0.05
    assert r.corrections >= 1
    files = r.write(str(tmp_path), emit_trajectory=True)
    assert (tmp_path / "SimplexTrajectory.svg").exists()
    assert len(files) == 8


def test_replications_and_errors():
    s = rdsm.run_replications(
        "rdsm", "linear-gradient", [-0.75, 0.35], 3, max_iter=50, max_eval=100,
        noise="uniform:0,0.02", seed=5,
    )
    assert [run.seed for run in s.runs] == [5, 6, 7]
    assert math.isclose(s.cost_stddev ** 2, s.cost_variance)
    assert s.to_csv().splitlines()[0] == "run,seed,x_1,x_2,J,iters,evals"
    with pytest.raises(ValueError):
        rdsm.run("dsm", "linear-gradient", [0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        rdsm.run("dsm", "linear-gradient", [0.0, 0.0], coefficients={"shrink": 0.5})


def test_format_real():
    assert rdsm.format_real(1000.0) == "1.000000000e3"
    assert rdsm.format_real(float("inf")) == "inf"
