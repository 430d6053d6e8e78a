import numpy as np
import pytest

from teamcover import kernels


def naive_weighted(bits_row, weights):
    return int(sum(w for b, w in zip(bits_row, weights) if b))


def random_data(rng, n_rows=17, n_bits=200):
    bools = rng.random((n_rows, n_bits)) < rng.uniform(0.05, 0.6)
    weights = rng.integers(0, 50, n_bits).astype(np.int64)
    return bools, kernels.pack_rows(bools), weights


def test_pack_rows_round_trip():
    rng = np.random.default_rng(0)
    bools, packed, _ = random_data(rng, n_rows=5, n_bits=130)
    assert packed.shape == (5, 3)
    for i in range(5):
        for d in range(130):
            bit = (packed[i, d >> 6] >> np.uint64(d & 63)) & np.uint64(1)
            assert bool(bit) == bools[i, d]


def backends():
    out = [kernels.NUMPY_BACKEND]
    if kernels.NUMBA_BACKEND is not None:
        out.append(kernels.NUMBA_BACKEND)
    return out


@pytest.mark.parametrize("backend", backends(), ids=lambda b: b.name)
def test_mask_value_matches_naive(backend):
    rng = np.random.default_rng(1)
    bools, packed, weights = random_data(rng)
    for i in range(len(bools)):
        assert int(backend.mask_value(packed[i], weights)) == naive_weighted(bools[i], weights)


@pytest.mark.parametrize("backend", backends(), ids=lambda b: b.name)
def test_gains_matches_naive(backend):
    rng = np.random.default_rng(2)
    bools, packed, weights = random_data(rng)
    covered_bools = rng.random(bools.shape[1]) < 0.3
    covered = kernels.pack_rows(covered_bools[None, :])[0]
    gains = backend.gains(packed, covered, weights)
    for i in range(len(bools)):
        residual = bools[i] & ~covered_bools
        assert int(gains[i]) == naive_weighted(residual, weights)


@pytest.mark.parametrize("backend", backends(), ids=lambda b: b.name)
def test_union_and_counts(backend):
    rng = np.random.default_rng(3)
    bools, packed, weights = random_data(rng)
    rows = np.array([0, 3, 7, 11], dtype=np.int64)
    union = backend.union_rows(packed, rows)
    expected_union = np.any(bools[rows], axis=0)
    assert int(backend.mask_value(union, weights)) == naive_weighted(expected_union, weights)
    counts = backend.cover_counts(packed, rows, bools.shape[1])
    np.testing.assert_array_equal(counts, bools[rows].sum(axis=0).astype(np.int32))


@pytest.mark.parametrize("backend", backends(), ids=lambda b: b.name)
def test_b_gains_and_counts_value(backend):
    rng = np.random.default_rng(4)
    bools, packed, weights = random_data(rng)
    counts = rng.integers(0, 4, bools.shape[1]).astype(np.int32)
    need = 2
    gain_new, gain_prog = backend.b_gains(packed, counts, weights, need)
    for i in range(len(bools)):
        expect_new = int(weights[(counts == need - 1) & bools[i]].sum())
        expect_prog = int(weights[(counts < need - 1) & bools[i]].sum())
        assert (int(gain_new[i]), int(gain_prog[i])) == (expect_new, expect_prog)
    assert int(backend.counts_value(counts, weights, need)) == int(weights[counts >= need].sum())


@pytest.mark.parametrize("backend", backends(), ids=lambda b: b.name)
def test_update_counts_inverse(backend):
    rng = np.random.default_rng(5)
    bools, packed, _ = random_data(rng)
    counts = rng.integers(0, 4, bools.shape[1]).astype(np.int32)
    snapshot = counts.copy()
    backend.update_counts(counts, packed[2], 1)
    np.testing.assert_array_equal(counts, snapshot + bools[2].astype(np.int32))
    backend.update_counts(counts, packed[2], -1)
    np.testing.assert_array_equal(counts, snapshot)


@pytest.mark.skipif(kernels.NUMBA_BACKEND is None, reason="numba unavailable")
def test_backends_agree_on_random_inputs():
    rng = np.random.default_rng(6)
    for _ in range(25):
        n_bits = int(rng.integers(1, 300))
        n_rows = int(rng.integers(1, 20))
        bools = rng.random((n_rows, n_bits)) < rng.uniform(0, 1)
        packed = kernels.pack_rows(bools)
        weights = rng.integers(0, 99, n_bits).astype(np.int64)
        covered = kernels.pack_rows((rng.random(n_bits) < 0.4)[None, :])[0]
        counts = rng.integers(0, 3, n_bits).astype(np.int32)
        rows = np.arange(n_rows, dtype=np.int64)[rng.random(n_rows) < 0.5]
        a, b = kernels.NUMPY_BACKEND, kernels.NUMBA_BACKEND
        np.testing.assert_array_equal(a.gains(packed, covered, weights),
                                      b.gains(packed, covered, weights))
        np.testing.assert_array_equal(a.union_rows(packed, rows), b.union_rows(packed, rows))
        np.testing.assert_array_equal(a.cover_counts(packed, rows, n_bits),
                                      b.cover_counts(packed, rows, n_bits))
        for need in (1, 2, 3):
            np.testing.assert_array_equal(
                np.stack(a.b_gains(packed, counts, weights, need)),
                np.stack(b.b_gains(packed, counts, weights, need)),
            )
            assert int(a.counts_value(counts, weights, need)) == int(
                b.counts_value(counts, weights, need)
            )
