import functools
import math

import numpy as np
import pytest

from surfport.noise import rng_stream
from surfport.statmech import (IsingSpec, dm_oracle_renyi, dm_purities, ising_log_partitions,
                               ising_relative_entropy, per_copy_rate, renyi_from_purities,
                               simulate_bell_experiment, swap_value)


def test_renyi_from_purities():
    assert renyi_from_purities(0.7, 0.7) == 0
    assert math.isclose(renyi_from_purities(0.846, 0.846 * math.exp(-1)), 1.0)
    assert renyi_from_purities(0.528, 0.0) == math.inf
    with pytest.raises(ValueError):
        renyi_from_purities(0.0, 0.1)


def test_per_copy_rate():
    q = per_copy_rate(0.2)
    assert math.isclose(2 * q * (1 - q), 0.2)
    pc = 1 / (2 + math.sqrt(2))
    assert abs(per_copy_rate(pc) - 0.178) < 5e-4


def test_half_is_zero():
    for L in (3, 4, 7):
        assert ising_relative_entropy(L, 0.5) == 0.0
        assert abs(dm_oracle_renyi(2, 0.5)) < 1e-12 if L == 3 else True


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("p", [0.02, 0.1, 0.25, 0.4])
def test_dense_oracle_matches_ising(d, p):
    assert abs(dm_oracle_renyi(d, p) - ising_relative_entropy(d, p)) < 1e-8


def test_ising_spec_route():
    K = math.atanh(1 - 2 * 0.2)
    assert np.allclose(ising_log_partitions(IsingSpec(4, K)), ising_log_partitions(4, 0.2))
    with pytest.raises(ValueError):
        IsingSpec(4, -1.0)


def test_nonnegative_and_decreasing():
    grid = np.linspace(0.02, 0.5, 25)
    for L in (3, 6, 10):
        vals = [ising_relative_entropy(L, p) for p in grid]
        assert min(vals) >= 0
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_crossings_sharpen():
    lo, hi = 0.26, 0.32
    diffs = [ising_relative_entropy(16, p) - ising_relative_entropy(8, p) for p in (lo, hi)]
    assert diffs[0] > 0 > diffs[1]
    small = abs(ising_relative_entropy(8, lo) - ising_relative_entropy(4, lo))
    large = abs(ising_relative_entropy(16, lo) - ising_relative_entropy(8, lo))
    assert large > small


def test_errors():
    with pytest.raises(ValueError):
        ising_relative_entropy(4, 0.0)
    with pytest.raises(ValueError):
        ising_relative_entropy(30, 0.1)
    with pytest.raises(ValueError):
        dm_purities(4, 0.1)
    with pytest.raises(ValueError):
        simulate_bell_experiment(2, 0.1, shots=0)


def test_swap_value_against_dense_bell_measurement():
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    readout = np.kron(h, np.eye(2)) @ cnot
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    vals, vecs = np.linalg.eigh(swap)
    basis = np.eye(4)
    for k in range(4):
        # each computational outcome pulls back to a Bell state
        bell = readout.T @ basis[k]
        a, b = k >> 1, k & 1
        x, z = 1 - 2 * a, 1 - 2 * b
        eig = bell @ swap @ bell
        assert math.isclose(eig, swap_value(x, z))
    assert sorted(swap_value(x, z) for x in (1, -1) for z in (1, -1)) == [-1, 1, 1, 1]


def test_bell_noiseless():
    est = simulate_bell_experiment(3, 0.0, "same", 2000, rng_stream(0))
    assert est.value == 1.0 and est.stderr == 0.0
    orth = simulate_bell_experiment(3, 0.0, "orthogonal", 40000, rng_stream(1))
    assert abs(orth.value) < 3 * orth.stderr + 1e-12


@pytest.mark.parametrize("d,q", [(2, 0.05), (3, 0.03)])
def test_bell_matches_dense_oracle(d, q):
    tr00, tr01 = dm_purities(d, q)
    same = simulate_bell_experiment(d, q, "same", 60000, rng_stream(4, d))
    orth = simulate_bell_experiment(d, q, "orthogonal", 60000, rng_stream(5, d))
    assert abs(same.value - tr00) < 3 * same.stderr
    assert abs(orth.value - tr01) < 3 * orth.stderr


def test_reference_purities_from_fitted_noise():
    assert abs(dm_purities(2, per_copy_rate(0.0211))[0] - 0.846) < 0.002
    assert abs(dm_purities(3, per_copy_rate(0.0351))[0] - 0.528) < 0.002
