import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from surfport import gf2
from surfport.lattice import (build_layout, layout_from_json, layout_to_json, logical_parity,
                              syndrome_of)


@pytest.mark.parametrize("d", range(2, 10))
def test_face_counts_and_weights(d):
    lay = build_layout(d)
    assert lay.n == d * d
    assert len(lay.x_faces) + len(lay.z_faces) == d * d - 1
    assert {f.weight for f in lay.x_faces + lay.z_faces} <= {2, 4}
    assert len(lay.logical_z) == len(lay.logical_x) == d


@pytest.mark.parametrize("d", range(2, 10))
def test_commutation(d):
    lay = build_layout(d)
    hx, hz = lay.check_matrix("X").astype(int), lay.check_matrix("Z").astype(int)
    assert not np.any(hx @ hz.T % 2)
    lz, lx = lay.logical_vector("Z").astype(int), lay.logical_vector("X").astype(int)
    assert not np.any(hx @ lz % 2) and not np.any(hz @ lx % 2)
    assert lz @ lx % 2 == 1
    # d^2 - 1 independent checks leave one logical qubit
    assert gf2.rank(hx) + gf2.rank(hz) == d * d - 1


def test_distance_three_logicals():
    lay = build_layout(3)
    assert sorted(lay.logical_z) == [6, 7, 8]
    assert sorted(lay.logical_x) == [0, 3, 6]


@pytest.mark.parametrize("d", [2, 3, 5])
def test_json_round_trip(d):
    lay = build_layout(d)
    back = layout_from_json(layout_to_json(lay))
    assert np.array_equal(back.check_matrix("X"), lay.check_matrix("X"))
    assert np.array_equal(back.check_matrix("Z"), lay.check_matrix("Z"))
    assert back.logical_z == lay.logical_z and back.logical_x == lay.logical_x


def test_single_flip_syndromes():
    lay = build_layout(5)
    for j in range(lay.n):
        e = np.zeros(lay.n, dtype=np.uint8)
        e[j] = 1
        assert 1 <= syndrome_of(lay, e).sum() <= 2


errors = st.integers(3, 7).flatmap(
    lambda d: st.tuples(st.just(d), st.lists(st.integers(0, 1), min_size=d * d, max_size=d * d),
                        st.lists(st.integers(0, 1), min_size=d * d, max_size=d * d)))


@settings(max_examples=60, deadline=None)
@given(errors)
def test_syndrome_is_linear(case):
    d, a, b = case
    lay = build_layout(d)
    a, b = np.array(a, dtype=np.uint8), np.array(b, dtype=np.uint8)
    for kind in ("Z", "X"):
        assert np.array_equal(syndrome_of(lay, a ^ b, kind), syndrome_of(lay, a, kind) ^ syndrome_of(lay, b, kind))


@settings(max_examples=60, deadline=None)
@given(errors, st.data())
def test_gauge_faces_are_invisible(case, data):
    d, a, _ = case
    lay = build_layout(d)
    e = np.array(a, dtype=np.uint8)
    k = data.draw(st.integers(0, len(lay.x_faces) - 1))
    g = lay.check_matrix("X")[k]
    assert np.array_equal(syndrome_of(lay, e ^ g), syndrome_of(lay, e))
    assert logical_parity(lay, e ^ g) == logical_parity(lay, e)


def test_batch_matches_single():
    lay = build_layout(4)
    rng = np.random.default_rng(3)
    e = rng.integers(0, 2, size=(7, lay.n)).astype(np.uint8)
    batch = syndrome_of(lay, e)
    for i in range(7):
        assert np.array_equal(batch[i], syndrome_of(lay, e[i]))


def test_bad_distance():
    with pytest.raises(ValueError):
        build_layout(1)
