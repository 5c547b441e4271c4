import math

import numpy as np
import pytest

from adaptod.energy import (
    LogitBatch,
    batch_energy_normalize,
    calibrated_energy,
    class_energy,
    global_energy,
    sample_energy,
)
from adaptod.errors import EnergyOverflowError, InvalidInputError, ShapeError

# frozen from a 40-digit mpmath evaluation of e^1 + e^2
E1_PLUS_E2 = 10.10733792738969546259071493192767031094
# frozen from a 40-digit mpmath evaluation of (e + e^2 + e^3) / 1.5
CALIB_123 = 20.12858323371824213567949639100625880528


class TestGlobalEnergy:
    def test_zero_logits(self):
        assert global_energy([0.0, 0.0, 0.0]) == pytest.approx(3.0, rel=1e-12)

    def test_log_logits(self):
        assert global_energy([math.log(2), math.log(3)]) == pytest.approx(5.0, rel=1e-12)

    def test_high_precision_reference(self):
        assert global_energy([1.0, 2.0]) == pytest.approx(E1_PLUS_E2, rel=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            global_energy([0.0, float("nan")])
        with pytest.raises(InvalidInputError):
            global_energy([0.0, float("inf")])

    def test_overflow_is_loud(self):
        with pytest.raises(EnergyOverflowError):
            global_energy([800.0, 800.0])

    def test_large_but_representable(self):
        # max-shift keeps this in range even though naive exp would be fine too
        assert math.isfinite(global_energy([700.0, 0.0]))

    def test_strictly_increasing_per_coordinate(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            v = rng.standard_normal(rng.integers(2, 12))
            base = global_energy(v)
            bumped = v.copy()
            j = rng.integers(0, v.size)
            bumped[j] += rng.uniform(0.01, 1.0)
            assert global_energy(bumped) > base


class TestCalibratedEnergy:
    def test_zero_prior_reduces_to_global(self):
        assert calibrated_energy([0.0, 0.0], [0.0, 0.0]) == pytest.approx(2.0, rel=1e-12)

    def test_forced_values(self):
        assert calibrated_energy([0.0, 0.0], [1.0, 3.0]) == pytest.approx(0.75, rel=1e-12)

    def test_high_precision_reference(self):
        got = calibrated_energy([1.0, 2.0, 3.0], [0.5, 0.5, 0.5])
        assert got == pytest.approx(CALIB_123, rel=1e-12)

    def test_matches_global_for_zero_prior_randomly(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            v = rng.standard_normal(5) * 3
            assert calibrated_energy(v, np.zeros(5)) == pytest.approx(
                global_energy(v), rel=1e-12
            )

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            calibrated_energy([0.0, 0.0], [0.0, 0.0, 0.0])

    def test_negative_prior_rejected(self):
        with pytest.raises(InvalidInputError):
            calibrated_energy([0.0, 0.0], [0.0, -1.0])


class TestBatchEnergyNormalize:
    def test_identical_rows(self):
        norm = batch_energy_normalize(np.ones((4, 3)))
        assert np.allclose(norm, 0.25)

    def test_single_row(self):
        norm = batch_energy_normalize(np.array([[5.0, -2.0, 0.3]]))
        assert np.allclose(norm, 1.0)

    def test_two_row_hand_case(self):
        norm = batch_energy_normalize(np.array([[0.0, 0.0], [math.log(3), 0.0]]))
        assert norm[:, 0] == pytest.approx([0.25, 0.75], rel=1e-12)
        assert norm[:, 1] == pytest.approx([0.5, 0.5], rel=1e-12)

    def test_empty_batch(self):
        with pytest.raises(InvalidInputError):
            batch_energy_normalize(np.empty((0, 3)))

    def test_columns_sum_to_one(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            rows = rng.standard_normal((rng.integers(1, 64), rng.integers(2, 16))) * 5
            norm = batch_energy_normalize(rows)
            assert np.abs(norm.sum(axis=0) - 1.0).max() < 1e-9

    def test_total_mass_equals_k(self):
        rng = np.random.default_rng(4)
        rows = rng.standard_normal((128, 17))
        norm = batch_energy_normalize(rows)
        assert norm.sum() == pytest.approx(17.0, abs=1e-9)

    def test_column_shift_invariance(self):
        # adding a constant to one column leaves that column's normalized
        # values unchanged and does not touch the other columns at all
        rng = np.random.default_rng(5)
        rows = rng.standard_normal((10, 4))
        shifted = rows.copy()
        shifted[:, 2] += 7.3
        a = batch_energy_normalize(rows)
        b = batch_energy_normalize(shifted)
        assert np.allclose(a[:, 2], b[:, 2], rtol=1e-12)
        others = [0, 1, 3]
        assert np.array_equal(a[:, others], b[:, others])

    def test_accepts_logit_batch(self):
        batch = LogitBatch(np.zeros((2, 2)), np.zeros((2, 2)))
        assert np.allclose(batch_energy_normalize(batch), 0.25)


class TestClassAndSampleEnergy:
    def test_full_subset_is_one(self):
        rng = np.random.default_rng(6)
        norm = batch_energy_normalize(rng.standard_normal((8, 5)))
        for j in range(5):
            assert class_energy(norm, range(8), j) == pytest.approx(1.0, abs=1e-9)

    def test_empty_subset(self):
        norm = batch_energy_normalize(np.zeros((3, 2)))
        assert class_energy(norm, [], 0) == 0.0

    def test_single_element_subset(self):
        norm = np.array([[0.25, 0.5], [0.75, 0.5]])
        assert class_energy(norm, [0], 0) == 0.25

    def test_out_of_range(self):
        norm = np.zeros((2, 2))
        with pytest.raises(IndexError):
            class_energy(norm, [0], 5)
        with pytest.raises(IndexError):
            class_energy(norm, [9], 0)
        with pytest.raises(IndexError):
            sample_energy(norm, 7)

    def test_sample_energy_symmetry(self):
        norm = batch_energy_normalize(np.ones((4, 6)))
        for i in range(4):
            assert sample_energy(norm, i) == pytest.approx(6 / 4, rel=1e-12)

    def test_single_row_sample_energy_is_k(self):
        norm = batch_energy_normalize(np.array([[1.0, -1.0, 0.0]]))
        assert sample_energy(norm, 0) == pytest.approx(3.0, rel=1e-12)

    def test_sample_energies_sum_to_k(self):
        rng = np.random.default_rng(8)
        rows = rng.standard_normal((37, 9)) * 2
        norm = batch_energy_normalize(rows)
        total = sum(sample_energy(norm, i) for i in range(37))
        assert total == pytest.approx(9.0, abs=1e-9)


class TestLogitBatch:
    def test_requires_rows(self):
        with pytest.raises(InvalidInputError):
            LogitBatch(np.empty((0, 3)), np.ones((1, 3)))

    def test_k_mismatch(self):
        with pytest.raises(ShapeError):
            LogitBatch(np.ones((1, 3)), np.ones((1, 4)))

    def test_stacked_order(self):
        b = LogitBatch(np.ones((2, 2)), np.zeros((3, 2)))
        assert b.stacked.shape == (5, 2)
        assert np.array_equal(b.id_indices(), [0, 1])
        assert np.array_equal(b.out_indices(), [2, 3, 4])
