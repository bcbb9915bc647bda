import itertools

import numpy as np
import pytest

from precis_cs.decoder import decode_unknown_support
from precis_cs.errors import UsageError
from precis_cs.oracle import l0_decode
from precis_cs.sensing import MeasurementVector, SparseSignal, build_vandermonde, measure


def test_hand_instance():
    A = build_vandermonde(4, 2)
    res = l0_decode(A, measure(A, SparseSignal(4, (3,), (2.0,))), 1)
    assert res.signal.support == (3,)
    assert res.signal.values == pytest.approx((2.0,))
    assert res.residual <= 1e-15
    assert res.unique


def test_zero_measurement():
    A = build_vandermonde(8, 4)
    res = l0_decode(A, MeasurementVector(np.zeros(4)), 2)
    assert res.signal.support == () and res.residual == 0


def test_size_limits():
    with pytest.raises(UsageError):
        l0_decode(build_vandermonde(20, 2), np.zeros(2), 1)
    with pytest.raises(UsageError):
        l0_decode(build_vandermonde(16, 8), np.zeros(8), 4)
    with pytest.raises(UsageError):
        l0_decode(build_vandermonde(8, 4), np.zeros(3), 2)


@pytest.mark.parametrize("n", [4, 7, 10])
def test_exact_inputs_recovered_uniquely(n):
    k = 2
    A = build_vandermonde(n, 2 * k)
    for size in (1, 2):
        for E in itertools.combinations(range(1, n + 1), size):
            for vals in itertools.product((1.0, -2.0), repeat=size):
                x = SparseSignal(n, E, vals)
                res = l0_decode(A, measure(A, x), k)
                assert res.signal.support == E
                np.testing.assert_allclose(res.signal.values, vals, rtol=1e-10)
                assert res.residual <= 1e-10
                assert res.unique


def test_sparsest_wins_over_better_fit():
    # a 1-sparse signal quantized coarsely: any 2-sparse support fits at least as
    # well, but the sparsest support within tolerance is returned
    A = build_vandermonde(8, 4)
    y = measure(A, SparseSignal(8, (5,), (1.0,))).quantized(8)
    assert l0_decode(A, y, 2).signal.support == (5,)


def test_agrees_with_decoder_on_quantized_input():
    A = build_vandermonde(12, 4)
    rng = np.random.default_rng(4)
    for _ in range(40):
        E = tuple(sorted(rng.choice(np.arange(1, 13), size=2, replace=False).tolist()))
        x = SparseSignal(12, E, rng.choice([1.0, -1.0, 2.0, -2.0], size=2))
        y = measure(A, x).quantized(16)
        assert l0_decode(A, y, 2).signal.support == decode_unknown_support(y, 12, 2).signal.support


def test_explicit_tolerance_none_fits():
    A = build_vandermonde(8, 2)
    res = l0_decode(A, [1.0, 0.3 + 0.2j], 1, tolerance=1e-12)
    # nothing fits: best 1-sparse candidate is returned with its residual
    assert res.signal.sparsity == 1 and res.residual > 1e-12
