import numpy as np
import pytest

from fusedalm.simulate import NoiseModel, SignalSpec, block_lengths, generate


def test_vanishing_noise():
    truth, noisy = generate(SignalSpec(500, seed=3, noise=NoiseModel.gaussian(1e-12)))
    assert np.max(np.abs(noisy - truth)) < 1e-4


def test_deterministic():
    spec = SignalSpec(1000, seed=42)
    a, b = generate(spec), generate(spec)
    assert a[0].tobytes() == b[0].tobytes()
    assert a[1].tobytes() == b[1].tobytes()
    assert not np.array_equal(generate(SignalSpec(1000, seed=43))[1], a[1])


@pytest.mark.parametrize("seed", range(5))
def test_occupancy_and_noise_variance(seed):
    truth, noisy = generate(SignalSpec(10_000, seed=seed, noise=NoiseModel.gaussian(0.1)))
    for level, target in ((0, 0.6), (1, 0.2), (2, 0.2)):
        assert abs(np.mean(truth == level) - target) <= 0.05
    assert abs(np.var(noisy - truth) - 0.1) <= 0.01


@pytest.mark.parametrize("n,seed", [(10, 0), (100, 1), (1000, 2), (7777, 3)])
def test_levels_and_block_lengths(n, seed):
    spec = SignalSpec(n, seed=seed)
    truth, _ = generate(spec)
    assert set(np.unique(truth)) <= {0.0, 1.0, 2.0}
    assert block_lengths(truth).min() >= spec.min_block_length


def test_student_t_has_heavy_tails():
    # calibration run: smallest max |noise| / scale over these 20 seeds was about 72
    for seed in range(20):
        truth, noisy = generate(SignalSpec(10_000, seed=seed, noise=NoiseModel.student_t(2, 0.3)))
        assert np.max(np.abs(noisy - truth)) > 6 * 0.3


def test_default_min_block_length():
    assert SignalSpec(100).min_block_length == 5
    assert SignalSpec(10_000).min_block_length == 200


@pytest.mark.parametrize("kw", [dict(n=1), dict(n=9), dict(n=100, fractions=(0.7, 0.5)),
                                dict(n=100, seed=-1), dict(n=100, min_block_length=0)])
def test_invalid_specs(kw):
    with pytest.raises(ValueError):
        SignalSpec(**kw)


@pytest.mark.parametrize("kw", [dict(kind="gaussian", variance=0), dict(kind="student_t", df=0),
                                dict(kind="student_t", scale=-1), dict(kind="laplace")])
def test_invalid_noise(kw):
    with pytest.raises(ValueError):
        NoiseModel(**kw)
