import numpy as np

from fusedalm.experiments import inner_loop_table, penalty_traces, robust_comparison, settle_iteration


def test_settle_iteration():
    assert settle_iteration(np.array([1.0, 1.0]), 1.0) == 1
    assert settle_iteration(np.array([5.0, 1.05, 2.0, 1.05, 1.0]), 1.0) == 4
    assert settle_iteration(np.array([5.0, 5.0]), 1.0) == 3


def test_inner_loop_table_rows():
    rows = inner_loop_table(sizes=(30,), T_values=(1, 3), replicates=2, tol=1e-6)
    assert [(r[0], r[1]) for r in rows] == [(1, 30), (3, 30)]
    assert all(r[3] >= r[2] for r in rows)


def test_inner_loop_table_parallel_matches_serial():
    kw = dict(sizes=(40,), T_values=(1, 2), replicates=2, tol=1e-6)
    serial = [r[:4] for r in inner_loop_table(**kw)]
    parallel = [r[:4] for r in inner_loop_table(jobs=2, **kw)]
    assert serial == parallel


def test_penalty_traces_shape():
    res = penalty_traces(n=100, iters=50, c_values=(0.5, 5.0))
    assert set(res.mse) == {0.5, 5.0}
    assert all(len(v) == 50 for v in res.mse.values())
    assert res.reference_mse > 0


def test_robust_comparison_picks_grid_points():
    res = robust_comparison(n=40, lambda1_grid=(0.0, 0.1), lambda2_grid=(0.5, 1.0))
    for name in ("quadratic", "lad"):
        assert res.params[name][0] in (0.0, 0.1)
        assert res.params[name][1] in (0.5, 1.0)
        assert res.fits[name].shape == (40,)
