import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsbaselines.ensemble import EnsembleForecast, combine, ensemble_average
from tsbaselines.errors import AlignmentError, ContractError

from conftest import HOUR, hourly


class TestEnsembleAverage:
    def test_midpoint(self):
        out = ensemble_average(hourly([2, 4]), hourly([4, 8]))
        assert list(out.counts) == [3.0, 6.0]

    def test_identity_on_equal_inputs(self):
        a = hourly([1, 5, 2])
        out = ensemble_average(a, hourly([1, 5, 2]))
        assert np.array_equal(out.counts, a.counts)

    def test_commutative(self):
        a, b = hourly([1, 2, 3]), hourly([9, 0, 3])
        assert np.array_equal(ensemble_average(a, b).counts, ensemble_average(b, a).counts)

    def test_misaligned_rejected(self):
        with pytest.raises(AlignmentError):
            ensemble_average(hourly([1, 2]), hourly([1, 2], start=HOUR))
        with pytest.raises(AlignmentError):
            ensemble_average(hourly([1, 2]), hourly([1, 2, 3]))

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0, max_value=1e6), st.floats(min_value=0, max_value=1e6)
            ),
            min_size=1,
            max_size=50,
        )
    )
    def test_pointwise_betweenness(self, pairs):
        a = hourly([p[0] for p in pairs])
        b = hourly([p[1] for p in pairs])
        out = ensemble_average(a, b)
        lo = np.minimum(a.counts, b.counts)
        hi = np.maximum(a.counts, b.counts)
        assert np.all(out.counts >= lo - 1e-9) and np.all(out.counts <= hi + 1e-9)


class TestWeightedCombine:
    def test_weighted_three_way(self):
        out = combine([hourly([10, 0]), hourly([0, 10]), hourly([10, 10])], [0.5, 0.25, 0.25])
        assert list(out.counts) == [7.5, 5.0]

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ContractError):
            combine([hourly([1]), hourly([2])], [0.7, 0.7])

    def test_weight_count_must_match(self):
        with pytest.raises(ContractError):
            combine([hourly([1]), hourly([2])], [1.0])

    def test_empty_rejected(self):
        with pytest.raises(ContractError):
            combine([])


class TestEnsembleForecast:
    def test_equal_weight_series(self):
        ef = EnsembleForecast.equal_weight([("a", hourly([2, 4])), ("b", hourly([4, 8]))])
        assert list(ef.series().counts) == [3.0, 6.0]
        assert ef.weights == (0.5, 0.5)

    def test_alignment_checked(self):
        with pytest.raises(AlignmentError):
            EnsembleForecast.equal_weight([("a", hourly([1])), ("b", hourly([1, 2]))])
