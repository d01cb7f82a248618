import numpy as np
import pytest

from proxmf import (
    EnergyModel,
    ModelError,
    energy,
    energy_bounds,
    energy_table,
    iterate_box,
)

from oracles import random_model


def two_pair_minus_single():
    # energy = 2 x0 x1 - x2
    return EnergyModel(
        n=3, terms=[((0, 1), 2.0), ((2,), -1.0)], priors=[0.5, 0.5, 0.5]
    )


class TestValidate:
    def test_minimal_model_is_valid(self):
        EnergyModel(n=1, terms=[((0,), 1.0)], priors=[0.5]).validate()

    def test_boundary_prior_rejected(self):
        m = EnergyModel(n=1, terms=[], priors=[0.0])
        with pytest.raises(ModelError, match="prior not interior"):
            m.validate()

    def test_duplicate_index_in_varset_rejected(self):
        m = EnergyModel(n=2, terms=[((0, 0), 1.0)], priors=[0.5, 0.5])
        with pytest.raises(ModelError, match="strictly increasing"):
            m.validate()

    def test_decreasing_varset_rejected(self):
        m = EnergyModel(n=2, terms=[((1, 0), 1.0)], priors=[0.5, 0.5])
        with pytest.raises(ModelError, match="strictly increasing"):
            m.validate()

    def test_duplicate_varset_rejected(self):
        m = EnergyModel(
            n=2, terms=[((0, 1), 1.0), ((0, 1), 2.0)], priors=[0.5, 0.5]
        )
        with pytest.raises(ModelError, match="duplicate varset"):
            m.validate()

    def test_index_out_of_range_rejected(self):
        m = EnergyModel(n=2, terms=[((0, 5), 1.0)], priors=[0.5, 0.5])
        with pytest.raises(ModelError, match="out of range"):
            m.validate()

    def test_non_finite_coefficient_rejected(self):
        m = EnergyModel(n=1, terms=[((0,), float("nan"))], priors=[0.5])
        with pytest.raises(ModelError, match="non-finite coefficient"):
            m.validate()

    def test_wrong_prior_count_rejected(self):
        m = EnergyModel(n=3, terms=[], priors=[0.5, 0.5])
        with pytest.raises(ModelError, match="expected 3 priors"):
            m.validate()

    def test_nonfinite_prior_rejected(self):
        m = EnergyModel(n=1, terms=[], priors=[float("inf")])
        with pytest.raises(ModelError, match="prior not interior"):
            m.validate()


class TestEnergy:
    def test_single_pair_term(self):
        m = EnergyModel(n=2, terms=[((0, 1), 2.0)], priors=[0.5, 0.5])
        assert energy(m, [1, 1]) == 2.0

    def test_annihilated_term(self):
        m = EnergyModel(n=2, terms=[((0, 1), 2.0)], priors=[0.5, 0.5])
        assert energy(m, [1, 0]) == 0.0

    def test_mixed_terms(self):
        assert energy(two_pair_minus_single(), [1, 1, 1]) == 1.0

    def test_constant_term(self):
        m = EnergyModel(n=1, terms=[((), 3.5)], priors=[0.5])
        assert energy(m, [0]) == 3.5
        assert energy(m, [1]) == 3.5

    def test_dimension_mismatch(self):
        m = EnergyModel(n=2, terms=[], priors=[0.5, 0.5])
        with pytest.raises(ValueError, match="shape"):
            energy(m, [1, 0, 1])


class TestEnergyBounds:
    def test_exact_small_model(self):
        b = energy_bounds(two_pair_minus_single())
        assert b.mode == "exact"
        assert (b.lower, b.upper) == (-1.0, 2.0)

    def test_zero_energy(self):
        b = energy_bounds(EnergyModel(n=2, terms=[], priors=[0.5, 0.5]))
        assert (b.lower, b.upper) == (0.0, 0.0)

    def test_interval_mode_matches_here(self):
        b = energy_bounds(two_pair_minus_single(), max_exact_n=0)
        assert b.mode == "interval"
        assert (b.lower, b.upper) == (-1.0, 2.0)

    def test_interval_includes_constant_term(self):
        m = EnergyModel(n=1, terms=[((), -3.0), ((0,), 2.0)], priors=[0.5])
        b = energy_bounds(m, max_exact_n=0)
        assert (b.lower, b.upper) == (-3.0, -1.0)

    def test_enumeration_within_bounds_both_modes(self):
        rng = np.random.default_rng(100)
        for _ in range(30):
            n = int(rng.integers(1, 9))
            m = random_model(rng, n)
            table = energy_table(m)
            exact = energy_bounds(m)
            interval = energy_bounds(m, max_exact_n=0)
            assert exact.lower <= table.min() and table.max() <= exact.upper
            assert interval.lower <= table.min() - 0 and table.max() <= interval.upper
            # exact bounds are attained
            assert table.min() == exact.lower
            assert table.max() == exact.upper
            # interval always encloses exact
            assert interval.lower <= exact.lower
            assert interval.upper >= exact.upper

    def test_enumeration_size_guard(self):
        m = EnergyModel(n=21, terms=[], priors=[0.5] * 21)
        with pytest.raises(ValueError, match="limited to 20"):
            energy_table(m)


class TestIterateBox:
    def test_degenerate_bounds_return_priors_exactly(self):
        m = EnergyModel(n=3, terms=[], priors=[0.3, 0.5, 0.9])
        box = iterate_box(m, energy_bounds(m))
        assert np.array_equal(box.lower, np.array([0.3, 0.5, 0.9]))
        assert np.array_equal(box.upper, np.array([0.3, 0.5, 0.9]))

    def test_unit_spread_uniform_prior(self):
        m = EnergyModel(n=1, terms=[((0,), 1.0)], priors=[0.5])
        box = iterate_box(m, energy_bounds(m))  # spread 1
        assert box.lower[0] == pytest.approx(0.2689414213699951, abs=1e-15)
        assert box.upper[0] == pytest.approx(0.7310585786300049, abs=1e-15)

    def test_spread_three(self):
        # spread 3 at uniform priors: endpoints 1/(1+e^3) and 1/(1+e^-3)
        box = iterate_box(two_pair_minus_single(), energy_bounds(two_pair_minus_single()))
        assert np.allclose(box.lower, 0.04742587317756678, atol=1e-15)
        assert np.allclose(box.upper, 0.9525741268224334, atol=1e-15)

    def test_widening_bounds_never_shrinks_box(self):
        rng = np.random.default_rng(200)
        from proxmf import EnergyBounds

        for _ in range(20):
            n = int(rng.integers(1, 6))
            m = random_model(rng, n)
            lo = float(rng.uniform(-2, 0))
            hi = float(rng.uniform(0, 2))
            narrow = iterate_box(m, EnergyBounds(lo, hi, "interval"))
            wide = iterate_box(m, EnergyBounds(lo - 0.5, hi + 1.0, "interval"))
            assert np.all(wide.lower <= narrow.lower + 1e-15)
            assert np.all(wide.upper >= narrow.upper - 1e-15)

    def test_box_strictly_interior(self):
        rng = np.random.default_rng(300)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            m = random_model(rng, n, coeff_scale=5.0)
            box = iterate_box(m, energy_bounds(m))
            assert np.all(box.lower > 0.0)
            assert np.all(box.upper < 1.0)
            assert np.all(box.lower <= box.upper)

    def test_priors_always_inside_box(self):
        rng = np.random.default_rng(400)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            m = random_model(rng, n)
            box = iterate_box(m, energy_bounds(m))
            assert box.contains(m.priors_array)


class TestModelValue:
    def test_equality_across_input_container_types(self):
        a = EnergyModel(n=2, terms=[((0, 1), 0.25)], priors=[0.5, 0.75])
        b = EnergyModel(
            n=2,
            terms=[([np.int64(0), np.int64(1)], np.float64(0.25))],
            priors=(0.5, 0.75),
        )
        assert a == b

    def test_terms_by_variable_partition(self):
        m = two_pair_minus_single()
        by_var = m.terms_by_variable
        assert len(by_var[0]) == 1 and by_var[0][0][0] == 2.0
        assert len(by_var[1]) == 1
        assert len(by_var[2]) == 1 and by_var[2][0][0] == -1.0
        assert list(by_var[0][0][1]) == [1]
        assert list(by_var[2][0][1]) == []
