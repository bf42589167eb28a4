import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chi2_contingency

from surfport.lattice import build_layout, logical_parity, syndrome_of
from surfport.noise import (ParityReport, ResponseMatrix, combined_rate, effective_channel,
                            effective_entangling, estimate_noise_from_parities, fit_linear_noise,
                            inject_classical_errors, load_response_matrices, max_distance,
                            mitigate_readout, parity_expectation, rng_stream, sample_error,
                            syndrome_flip_rate)

HALF, QUARTER = math.pi / 2, math.pi / 4
NOISE_BY_DISTANCE = {2: 0.0237, 3: 0.0306, 4: 0.0364, 5: 0.0380, 6: 0.0484, 7: 0.0505}


def test_effective_entangling_examples():
    assert effective_entangling(HALF, 0, 0) == 0
    assert math.isclose(effective_entangling(HALF, 0, 0.5), QUARTER)
    assert math.isclose(math.sin(effective_entangling(QUARTER, 0, 0.03)) ** 2, 0.06)
    assert math.isclose(effective_entangling(HALF, 0.1, 0.0), 0.1)
    with pytest.raises(ValueError):
        effective_entangling(0.3, 0.1, 0.0)
    with pytest.raises(ValueError):
        effective_entangling(HALF, 1.0, 0.0)


def test_flip_rate_at_thresholds():
    assert abs(syndrome_flip_rate(HALF, 0.1072128 * math.pi) - 0.1092212) < 1e-4
    assert abs(syndrome_flip_rate(QUARTER, 0.1548014 * math.pi) - 0.1092212) < 1e-4
    assert math.isclose(syndrome_flip_rate(HALF, QUARTER), 0.5)
    ch = effective_channel(QUARTER, 0.1, 0.02)
    assert math.isclose(ch.q, math.sin(ch.t_eff) ** 2 / 2)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([HALF, QUARTER]), st.floats(0, QUARTER), st.floats(0, QUARTER),
       st.floats(0, 0.5), st.floats(0, 0.5))
def test_effective_entangling_monotone(theta, t1, t2, p1, p2):
    lo_t, hi_t = sorted((t1, t2))
    lo_p, hi_p = sorted((p1, p2))
    assert effective_entangling(theta, lo_t, lo_p) <= effective_entangling(theta, hi_t, lo_p) + 1e-12
    assert effective_entangling(theta, lo_t, lo_p) <= effective_entangling(theta, lo_t, hi_p) + 1e-12


def test_composition_law():
    lay = build_layout(3)
    t, p, shots = 0.08 * math.pi, 0.04, 400000
    q_eff = syndrome_flip_rate(HALF, effective_entangling(HALF, t, p))
    a = sample_error(lay, math.sin(t) ** 2, rng_stream(1, 0), shots) ^ sample_error(lay, p, rng_stream(1, 1), shots)
    b = sample_error(lay, q_eff, rng_stream(1, 2), shots)
    weights = 1 << np.arange(len(lay.z_faces))
    ka = syndrome_of(lay, a) @ weights
    kb = syndrome_of(lay, b) @ weights
    table = np.stack([np.bincount(ka, minlength=16), np.bincount(kb, minlength=16)])
    _, pval, _, _ = chi2_contingency(table)
    assert pval > 1e-3


def test_sample_error_statistics():
    lay = build_layout(7)
    assert not sample_error(lay, 0.0, rng_stream(0), 100).any()
    shots, q = 100000, 0.109
    e = sample_error(lay, q, rng_stream(3), shots)
    counts = e.sum(axis=1)
    assert abs(counts.mean() - 49 * q) < 3 * math.sqrt(49 * q * (1 - q) / shots)
    lp = logical_parity(build_layout(3), sample_error(build_layout(3), 0.5, rng_stream(4), shots))
    assert abs(lp.mean() - 0.5) < 3 * math.sqrt(0.25 / shots)
    with pytest.raises(ValueError):
        sample_error(lay, 0.6, rng_stream(0))


def test_parity_expectation():
    assert parity_expectation(0, 4) == 1
    assert math.isclose(parity_expectation(0.05, 4), 0.6561)
    assert parity_expectation(0.5, 2) == 0
    with pytest.raises(ValueError):
        parity_expectation(0.1, 3)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 0.5), st.integers(1, 6), st.integers(1, 6))
def test_estimate_inverts_parities(p, n2, n4):
    vals = [parity_expectation(p, 2)] * n2 + [parity_expectation(p, 4)] * n4
    rep = ParityReport(vals, [2] * n2 + [4] * n4)
    assert math.isclose(estimate_noise_from_parities(rep), p, abs_tol=1e-12)


def test_estimate_edge_cases():
    assert estimate_noise_from_parities(ParityReport([1, 1, 1], [2, 4, 4])) == 0
    assert estimate_noise_from_parities(ParityReport([0, 0], [2, 4])) == 0.5
    with pytest.raises(ValueError):
        estimate_noise_from_parities(ParityReport([1, 1], [4, 4]))
    with pytest.raises(ValueError):
        estimate_noise_from_parities(ParityReport([0.5, -0.9], [2, 4]))


def test_linear_noise_fit_on_measured_rates():
    a, d0 = fit_linear_noise(list(NOISE_BY_DISTANCE), list(NOISE_BY_DISTANCE.values()))
    assert abs(a - 0.0054) <= 0.1 * 0.0054
    assert abs(d0 - 2.5) <= 0.1 * 2.5
    assert max_distance(a, d0, 0.109) == 17
    assert max_distance(0.0054, 2.5, 0.109) == 17


def test_linear_fit_exact_and_degenerate():
    ds = [2, 3, 5, 8]
    a, d0 = fit_linear_noise(ds, [0.004 * (d + 1.5) for d in ds])
    assert math.isclose(a, 0.004) and math.isclose(d0, 1.5)
    with pytest.raises(ValueError):
        fit_linear_noise([3, 3], [0.1, 0.2])


def _face_counts(parity, mats, shots, rng):
    """Sample a 2-qubit face with given parity, pass each bit through its response matrix."""
    k = len(mats)
    p_even = (1 + parity) / 2
    true = np.zeros((shots, k), dtype=np.uint8)
    odd = rng.random(shots) >= p_even
    true[:, 0] = odd
    obs = true.copy()
    for j, m in enumerate(mats):
        flip0 = rng.random(shots) < m.m[1, 0]
        flip1 = rng.random(shots) < m.m[0, 1]
        obs[:, j] = np.where(true[:, j] == 0, flip0, ~flip1.astype(bool)).astype(np.uint8)
    idx = obs @ (1 << np.arange(k - 1, -1, -1))
    return np.bincount(idx, minlength=2 ** k)


def test_readout_round_trip():
    rng = rng_stream(9)
    mats = [ResponseMatrix.from_errors(0.02, 0.01)] * 4
    counts = _face_counts(0.8, mats, 100000, rng)
    raw = sum(((-1) ** bin(i).count("1")) * c for i, c in enumerate(counts)) / counts.sum()
    fixed = mitigate_readout(counts, mats)
    assert raw < 0.8 - 0.02
    assert abs(fixed - 0.8) < 0.01


def test_readout_identity_and_singular():
    counts = [40, 10, 5, 45]
    eye = [np.eye(2), np.eye(2)]
    assert math.isclose(mitigate_readout(counts, eye), (40 - 10 - 5 + 45) / 100)
    with pytest.raises(ValueError):
        mitigate_readout(counts, [np.full((2, 2), 0.5)] * 2)
    with pytest.raises(ValueError):
        ResponseMatrix(np.array([[0.9, 0.1], [0.2, 0.9]]))


def test_load_response_matrices():
    js = json.dumps([{"qubit": 3, "m": [[0.98, 0.01], [0.02, 0.99]]}])
    csv_text = "qubit,m00,m01,m10,m11\n3,0.98,0.01,0.02,0.99\n"
    a = load_response_matrices(js, "json")[3]
    b = load_response_matrices(csv_text, "csv")[3]
    assert np.allclose(a.m, b.m)
    assert np.allclose(a.m, ResponseMatrix.from_errors(0.02, 0.01).m)


def test_classical_errors():
    bits = np.zeros((100000, 4), dtype=np.uint8)
    assert not inject_classical_errors(bits, 0.0, rng_stream(0)).any()
    flipped = inject_classical_errors(bits, 0.1, rng_stream(0))
    assert abs(flipped.mean() - 0.1) < 3 * math.sqrt(0.09 / flipped.size)
    assert math.isclose(combined_rate(0.0211, 0.1), 0.11689, abs_tol=1e-5)
    assert math.isclose(combined_rate(0.3, 0.5), 0.5)


def test_rng_streams():
    a = rng_stream(5, 1, 2).random(4)
    assert np.array_equal(a, rng_stream(5, 1, 2).random(4))
    assert not np.array_equal(a, rng_stream(5, 2, 1).random(4))
