import numpy as np
import pytest

from fusedalm import AlmConfig, CoordinateProblem, LossModel, objective, solve
from fusedalm.loss import lad_gamma_update
from fusedalm.oracle import OracleConfig, grid_minimize_1d, subgradient_solve

from conftest import LOSSES, cvxpy_reference, random_signal


def test_grid_quadratic():
    assert grid_minimize_1d(lambda x: x * x, -1, 1, 1e-8) == pytest.approx(0, abs=1e-8)


def test_grid_kink():
    assert grid_minimize_1d(lambda x: np.abs(x - 3), 0, 10, 1e-8) == pytest.approx(3, abs=1e-8)


def test_grid_scalar_only_function():
    import math
    assert grid_minimize_1d(lambda x: math.cosh(x - 0.25), -2, 2, 1e-8) == pytest.approx(0.25, abs=1e-6)


def test_grid_cross_checks_lad_update(rng):
    for _ in range(200):
        p = CoordinateProblem(*rng.normal(scale=3, size=3), rng.uniform(0.1, 10), rng.uniform(0, 2))
        f = lambda g: np.abs(p.y - g) + p.penalty(g)  # noqa: E731
        s = 1 + abs(p.y) + abs(p.beta)
        assert grid_minimize_1d(f, p.beta - 5 * s, p.beta + 5 * s) == pytest.approx(lad_gamma_update(p), abs=1e-6)


def test_subgradient_constant_signal():
    y = np.full(15, 1.3)
    np.testing.assert_allclose(subgradient_solve(y, LOSSES["quadratic"], 0, 1), y, atol=1e-4)


def test_subgradient_two_points():
    np.testing.assert_allclose(subgradient_solve([0.0, 4.0], LOSSES["quadratic"], 0, 1), [1, 3], atol=1e-3)


@pytest.mark.parametrize("kind", ["quadratic", "lad", "huber"])
def test_subgradient_close_to_interior_point(rng, kind):
    loss = LOSSES[kind]
    for _ in range(3):
        y = random_signal(rng, int(rng.integers(5, 40)))
        b = subgradient_solve(y, loss, 0.3, 1.0)
        ref = objective(cvxpy_reference(y, loss, 0.3, 1.0), y, loss, 0.3, 1.0)
        assert objective(b, y, loss, 0.3, 1.0) <= ref + 1e-5 * (1 + abs(ref))


def test_mutual_bound_with_alm_on_lad(rng):
    y = random_signal(rng, 30)
    loss = LOSSES["lad"]
    alm = solve(y, loss, AlmConfig(lambda1=0.2, lambda2=0.7)).final_objective
    orc = objective(subgradient_solve(y, loss, 0.2, 0.7), y, loss, 0.2, 0.7)
    assert orc >= alm - 1e-5 * (1 + abs(alm))
    assert alm <= orc + 1e-5 * (1 + abs(orc))


def test_custom_loss_python_path(rng):
    huber = LOSSES["huber"]
    custom = LossModel("custom", value=huber.evaluate, subgradient=huber.subgradient_interval)
    y = random_signal(rng, 8)
    cfg = OracleConfig(subgrad_iters=20_000)
    a = subgradient_solve(y, custom, 0.1, 0.5, cfg)
    b = subgradient_solve(y, huber, 0.1, 0.5, cfg)
    assert objective(a, y, huber, 0.1, 0.5) == pytest.approx(objective(b, y, huber, 0.1, 0.5), abs=1e-6)


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(grid_points=1)
    with pytest.raises(ValueError):
        OracleConfig(stages=0)
