import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from precis_cs.errors import DomainError, UsageError
from precis_cs.numerics import (
    PrecisionSpec,
    complex_vector,
    dynamic_range,
    inf_norm,
    meets_precision,
    quantize,
    relative_inf_error,
    to_mode,
    vector_from_json,
    vector_to_json,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
vectors = st.lists(cplx, min_size=1, max_size=12).filter(lambda v: max(abs(z) for z in v) > 1e-6)
bits = st.integers(min_value=0, max_value=60)


class TestRelativeError:
    def test_identity(self):
        assert relative_inf_error([1, -2], [1, -2]) == 0

    def test_real_ratio(self):
        assert relative_inf_error([1.0, 0.0], [1.0, 0.25]) == 0.25

    def test_complex_modulus(self):
        assert relative_inf_error([1 + 1j, 0], [1, 0]) == 1.0

    def test_zero_exact_is_domain_error(self):
        with pytest.raises(DomainError):
            relative_inf_error([1, 2], [0, 0])

    def test_length_mismatch_is_usage_error(self):
        with pytest.raises(UsageError):
            relative_inf_error([1, 2], [1, 2, 3])

    @given(vectors, vectors, st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, a, b, c):
        m = min(len(a), len(b))
        a, b = np.array(a[:m]), np.array(b[:m])
        assume(inf_norm(b) > 1e-3)
        for s in (c, -c):
            assert relative_inf_error(s * a, s * b) == pytest.approx(
                relative_inf_error(a, b), rel=1e-9, abs=1e-12)

    @given(vectors)
    def test_self_is_zero(self, v):
        assert relative_inf_error(v, v) == 0


class TestMeetsPrecision:
    def test_zero_error_any_bits(self):
        assert meets_precision([1, 2], [1, 2], 50)

    def test_strict_boundary(self):
        # ratio 0.25 vs threshold 2**-2
        assert not meets_precision([1.0, 0.0], [1.0, 0.25], 2)

    def test_below_threshold(self):
        assert meets_precision([1.0, 0.05], [1.0, 0.25], PrecisionSpec(2))

    def test_negative_bits_rejected(self):
        with pytest.raises(UsageError):
            PrecisionSpec(-1)


class TestQuantize:
    def test_grid_aligned_fixed_point(self):
        np.testing.assert_array_equal(quantize([1.0, -0.5], 2), [1.0, -0.5])

    def test_rounds_to_eighths(self):
        out = quantize([1.0, 0.37], 3)
        np.testing.assert_array_equal(out, [1.0, 0.375])
        assert relative_inf_error(out, [1.0, 0.37]) == pytest.approx(0.005)
        assert 0.005 < 2 ** -3

    def test_parts_rounded_independently(self):
        # The grid step uses the modulus norm |1 + 0.37i|, not 1.
        step = 2 ** -3 * math.hypot(1.0, 0.37)
        out = quantize([1 + 0.37j], 3)
        assert out[0].real == pytest.approx(8 * step, rel=1e-15)
        assert out[0].imag == pytest.approx(3 * step, rel=1e-15)
        assert meets_precision(out, [1 + 0.37j], 3)

    def test_ties_round_away_from_zero(self):
        # step 0.25: 0.125 and -0.375 are exact ties
        np.testing.assert_array_equal(quantize([1.0, 0.125, -0.375], 2), [1.0, 0.25, -0.5])

    def test_zero_vector_is_domain_error(self):
        with pytest.raises(DomainError):
            quantize([0, 0], 4)

    def test_grid_finer_than_float_returns_input(self):
        v = np.array([1.0, 1 / 3])
        np.testing.assert_array_equal(quantize(v, 64), v)

    @given(vectors, bits)
    def test_always_meets_precision(self, v, b):
        assert meets_precision(quantize(v, b), v, b)

    @given(vectors, bits)
    @settings(max_examples=200)
    def test_requantization(self, v, b):
        q1 = quantize(v, b)
        q2 = quantize(q1, b)
        if inf_norm(q1) == inf_norm(np.asarray(v, dtype=complex)):
            np.testing.assert_array_equal(q2, q1)
        else:
            # two half-steps on nearby grids: (sqrt 2 + 2**-b / 2) * 2**-b < 2**(1-b)
            assert meets_precision(q2, q1, b)
            assert relative_inf_error(q2, v) < 2.0 ** (1 - b)

    def test_requantization_norm_change_branch(self):
        # step = |0.6+0.6i|/2; each part rounds to one step, shrinking the norm.
        v = np.array([0.6 + 0.6j, 0.2])
        q1 = quantize(v, 1)
        assert inf_norm(q1) != inf_norm(v)
        q2 = quantize(q1, 1)
        assert meets_precision(q2, q1, 1)
        assert relative_inf_error(q2, v) < 2.0 ** (1 - 1)

    @pytest.mark.xfail(strict=True, reason="after a norm change the two roundings can add "
                       "up: error 1.34 * 2**-3 relative to v here")
    def test_requantization_within_b_bits_of_original(self):
        v = np.array([-0.43 + 0.62j, -0.14 + 0.75j])
        assert meets_precision(quantize(quantize(v, 3), 3), v, 3)

    def test_extended_mode(self):
        v = to_mode([1.0, 0.37], "extended")
        out = quantize(v, 3)
        assert out.dtype == object
        assert [complex(z) for z in out] == [1.0, 0.375]
        w = to_mode([1.0, 1 / 3], "extended")
        assert meets_precision(quantize(w, 100), w, 100)


class TestDynamicRange:
    def test_single_nonzero(self):
        assert dynamic_range([0, 5, 0]) == 1

    def test_ratio(self):
        assert dynamic_range([0, 3, 0, -1.5]) == 2

    def test_ell_eight(self):
        assert dynamic_range([2 ** 8, -1]) == 256

    def test_all_zero(self):
        with pytest.raises(DomainError):
            dynamic_range([0.0, 0.0])

    @given(st.lists(finite.filter(lambda x: abs(x) > 1e-3), min_size=1, max_size=8),
           st.floats(min_value=1e-3, max_value=1e3), st.randoms())
    def test_scale_and_permutation_invariance(self, x, c, rnd):
        base = dynamic_range(x)
        y = list(x)
        rnd.shuffle(y)
        assert dynamic_range(y) == base
        assert dynamic_range([-c * v for v in x]) == pytest.approx(base, rel=1e-12)


def test_complex_vector_validation():
    with pytest.raises(UsageError):
        complex_vector([])
    with pytest.raises(UsageError):
        complex_vector([1, math.nan])


def test_json_round_trip():
    v = np.array([1 + 2j, -0.5j])
    data = vector_to_json(v)
    assert data == [{"re": 1.0, "im": 2.0}, {"re": 0.0, "im": -0.5}]
    np.testing.assert_array_equal(vector_from_json(data), v)
    with pytest.raises(UsageError):
        vector_from_json([{"re": 1.0}])
