"""Tests for the OTFS numerology, Zak transforms and period constraints."""

import math

import numpy as np
import numpy.testing as npt
import pytest
from pydantic import ValidationError

from app.core.errors import DimensionError
from app.schemas.frame import BindingConstraint, DDFrame, FeasibilityInputs, FrameParams
from app.sim import ddcore


class TestFrameParams:

    def test_duration_is_derived_from_the_grid(self):
        """Omitting the frame duration gives T_OTFS = M*N/B."""
        params = FrameParams.from_grid(64e6, 512, 128)
        assert params.frame_duration_s == pytest.approx(1.024e-3)
        assert params.num_samples == 65536
        assert params.slot_duration_s == pytest.approx(8e-6)

    def test_delay_and_doppler_periods(self):
        """tau_r = T_s and nu_r = B/M, so tau_r * nu_r = 1."""
        params = FrameParams.from_grid(64e6, 512, 128)
        assert params.subcarrier_spacing_hz == pytest.approx(125e3)
        assert params.delay_period_s == params.slot_duration_s
        assert params.doppler_period_hz == params.subcarrier_spacing_hz
        assert params.delay_period_s * params.doppler_period_hz == pytest.approx(1.0)
        assert params.sample_interval_s == pytest.approx(1 / 64e6)

    def test_inconsistent_duration_is_rejected(self):
        """M*N must equal round(B*T_OTFS)."""
        with pytest.raises(ValidationError):
            FrameParams(bandwidth_hz=64e6, frame_duration_s=1e-3, subcarriers=512, time_slots=128)

    def test_with_slots_keeps_the_sample_count(self):
        params = FrameParams.from_grid(64e6, 128, 16).with_slots(4)
        assert (params.subcarriers, params.time_slots) == (512, 4)
        with pytest.raises(ValueError):
            FrameParams.from_grid(64e6, 128, 16).with_slots(3)


class TestZakTransforms:

    def test_single_dc_symbol(self):
        """X[0,0]=1 maps to 1/sqrt(N) at the first sample of every slot."""
        params = FrameParams.from_grid(1e6, 2, 4)
        data = np.zeros((4, 2), dtype=complex)
        data[0, 0] = 1
        x = ddcore.idzt(DDFrame(data=data, params=params))
        expected = np.zeros(8, dtype=complex)
        expected[::2] = 0.5
        npt.assert_allclose(x, expected, atol=1e-15)

    def test_round_trip_and_energy(self, small_params, rng):
        """DZT(IDZT(X)) recovers X and the transform preserves energy."""
        data = rng.standard_normal((4, 16)) + 1j * rng.standard_normal((4, 16))
        frame = DDFrame(data=data, params=small_params)
        x = ddcore.idzt(frame)
        npt.assert_allclose(ddcore.dzt(x, small_params).data, data, atol=1e-12)
        assert np.sum(np.abs(x) ** 2) == pytest.approx(frame.energy(), rel=1e-12)

    def test_dzt_rejects_wrong_length(self, small_params):
        with pytest.raises(DimensionError):
            ddcore.dzt(np.zeros(63), small_params)

    def test_delay_shift_is_a_cyclic_time_delay(self, small_params, rng):
        frame = ddcore.qam_frame(small_params, 16, rng)
        shifted = ddcore.delay_shift(frame, 5)
        npt.assert_allclose(ddcore.idzt(shifted), np.roll(ddcore.idzt(frame), 5), atol=1e-12)


class TestCyclicPrefix:

    def test_prefix_copies_the_slot_tail(self, rng):
        params = FrameParams.from_grid(1e6, 8, 3, cp_len=2)
        x = rng.standard_normal(24) + 0j
        with_cp = ddcore.add_cp_per_slot(x, params)
        assert with_cp.size == 30
        slots = with_cp.reshape(3, 10)
        npt.assert_array_equal(slots[:, :2], x.reshape(3, 8)[:, 6:])
        npt.assert_array_equal(ddcore.remove_cp_per_slot(with_cp, params), x)

    def test_prefix_longer_than_slot(self):
        params = FrameParams.from_grid(1e6, 8, 3, cp_len=9)
        with pytest.raises(DimensionError):
            ddcore.add_cp_per_slot(np.zeros(24), params)

    def test_overhead_conventions(self):
        """32 samples over a 128 slot is 20%; 4 samples over the original 512+32 is 0.735%."""
        assert ddcore.cp_len_samples(64e6, 500e-9) == 32
        assert ddcore.cp_overhead(64e6, 500e-9, 128) == pytest.approx(0.2)
        assert ddcore.cp_overhead(64e6, 62.5e-9, 512, 500e-9) == pytest.approx(4 / 544)


class TestFeasibility:

    def _inputs(self, delay, doppler):
        return FeasibilityInputs(
            delay_spread_s=delay,
            doppler_spread_hz=doppler,
            max_cp_overhead=0.005,
            max_slots=8,
            frame_duration_s=1e-3,
        )

    def test_unaligned_channel_is_infeasible(self):
        """500 ns / 15.57 kHz: lower bound 125 us exceeds 1/nu = 64.2 us."""
        result = ddcore.feasible_interval(self._inputs(500e-9, 15.57e3))
        assert not result.feasible
        assert result.lower_bound_s == pytest.approx(1.25e-4)
        assert result.upper_bound_s == pytest.approx(6.4226e-5, rel=1e-4)
        assert result.binding_constraint == BindingConstraint.PAPR_SLOTS
        assert result.cp_overhead_bound_s == pytest.approx(9.95e-5)

    def test_aligned_channel_is_feasible(self):
        """60 ns / 2 kHz leaves [125 us, 500 us)."""
        inputs = self._inputs(60e-9, 2e3)
        result = ddcore.feasible_interval(inputs)
        assert result.feasible
        assert result.lower_bound_s == pytest.approx(1.25e-4)
        assert result.upper_bound_s == pytest.approx(5e-4)
        assert ddcore.feasible_slot_range(inputs) == [3, 4, 5, 6, 7, 8]

    def test_zero_doppler_has_no_upper_bound(self):
        result = ddcore.feasible_interval(self._inputs(60e-9, 0.0))
        assert math.isinf(result.upper_bound_s)
        assert result.feasible

    def test_minimum_slots_for_doppler(self):
        """A 1.024 ms frame at 28 GHz and 300 km/h needs 16 slots."""
        nu = ddcore.doppler_spread(28e9, 300 / 3.6)
        assert nu == pytest.approx(15566, rel=1e-3)
        assert ddcore.min_slots_for_doppler(1.024e-3, nu) == 16
        assert ddcore.min_slots_for_doppler(1e-3, 0.0) == 1


class TestQam:

    def test_unit_energy_constellation(self, rng):
        params = FrameParams.from_grid(1e6, 64, 64)
        frame = ddcore.qam_frame(params, 16, rng)
        assert np.mean(np.abs(frame.data) ** 2) == pytest.approx(1.0, rel=0.05)
        levels = np.unique(np.round(frame.data.real * math.sqrt(10), 9))
        npt.assert_allclose(levels, [-3, -1, 1, 3])


class TestGoldenValues:

    def test_single_symbol_off_the_origin(self):
        """X[1, 2] = 1 on a 4x4 grid lands on x[2 + 4c] = exp(j2*pi*c/4) / 2."""
        params = FrameParams.from_grid(1e6, 4, 4)
        data = np.zeros((4, 4), dtype=complex)
        data[1, 2] = 1
        x = ddcore.idzt(DDFrame(data=data, params=params))
        expected = np.zeros(16, dtype=complex)
        expected[2::4] = np.exp(2j * np.pi * np.arange(4) / 4) / 2
        npt.assert_allclose(x, expected, atol=1e-15)

    def test_dzt_of_an_impulse_and_a_constant(self):
        params = FrameParams.from_grid(1e6, 4, 4)
        impulse = np.zeros(16)
        impulse[0] = 1
        Y = ddcore.dzt(impulse, params).data
        npt.assert_allclose(Y[:, 0], 0.5)
        npt.assert_allclose(Y[:, 1:], 0, atol=1e-15)

        Y = ddcore.dzt(np.ones(16), params).data
        npt.assert_allclose(Y[0], 2.0)
        npt.assert_allclose(Y[1:], 0, atol=1e-15)

    @pytest.mark.parametrize("slots,subcarriers", [(2, 2), (4, 8), (16, 32), (128, 512)])
    def test_unitarity_across_sizes(self, slots, subcarriers, rng):
        """100 random frames per size: exact inverse and energy preserved."""
        params = FrameParams.from_grid(1e6, subcarriers, slots)
        for _ in range(100):
            data = rng.standard_normal((slots, subcarriers)) + 1j * rng.standard_normal((slots, subcarriers))
            x = ddcore.idzt(DDFrame(data=data, params=params))
            assert np.max(np.abs(ddcore.dzt(x, params).data - data)) < 1e-12
            assert np.sum(np.abs(x) ** 2) == pytest.approx(np.sum(np.abs(data) ** 2), rel=1e-12)

    def test_time_domain_inverse(self, rng):
        params = FrameParams.from_grid(1e6, 32, 16)
        for _ in range(100):
            y = rng.standard_normal(512) + 1j * rng.standard_normal(512)
            npt.assert_allclose(ddcore.idzt(ddcore.dzt(y, params)), y, atol=1e-12)

    def test_cp_overheads_at_full_scale(self):
        """5.88% for 500 ns at M=512; 0.735% for the aligned 62.5 ns on the original slot."""
        assert ddcore.cp_overhead(64e6, 500e-9, 512) == pytest.approx(32 / 544)
        assert round(ddcore.cp_overhead(64e6, 500e-9, 512) * 100, 2) == 5.88
        assert ddcore.cp_overhead(64e6, 62.5e-9, 512, 500e-9) == pytest.approx(0.00735, rel=1e-3)
        assert ddcore.cp_overhead(64e6, 0.0, 512) == 0

    def test_cp_overhead_monotonicity(self):
        taus = [0.0, 50e-9, 250e-9, 500e-9]
        overheads = [ddcore.cp_overhead(64e6, t, 512) for t in taus]
        assert overheads == sorted(overheads)
        assert ddcore.cp_overhead(64e6, 500e-9, 1024) < ddcore.cp_overhead(64e6, 500e-9, 512)

    def test_doppler_at_28ghz(self):
        assert ddcore.max_doppler_shift(28e9, 300 / 3.6) == pytest.approx(7785, rel=1e-3)
        assert ddcore.max_doppler_shift(28e9, 0.0) == 0
        assert ddcore.max_doppler_shift(28e9, 600 / 3.6) == pytest.approx(2 * ddcore.max_doppler_shift(28e9, 300 / 3.6))
        with pytest.raises(ValueError):
            ddcore.max_doppler_shift(-1.0, 10.0)

    def test_half_overhead_budget(self):
        """(1 - rho)/rho = 1 at rho = 50%, so the CP bound equals the delay spread."""
        result = ddcore.feasible_interval(FeasibilityInputs(
            delay_spread_s=500e-9,
            doppler_spread_hz=1e3,
            max_cp_overhead=0.5,
            max_slots=8,
            frame_duration_s=1e-3,
        ))
        assert result.cp_overhead_bound_s == pytest.approx(500e-9)
        assert result.delay_spread_bound_s == 500e-9

    def test_smaller_spreads_never_shrink_the_interval(self):
        def interval(delay, doppler):
            result = ddcore.feasible_interval(FeasibilityInputs(
                delay_spread_s=delay,
                doppler_spread_hz=doppler,
                max_cp_overhead=0.005,
                max_slots=8,
                frame_duration_s=1e-3,
            ))
            return result.lower_bound_s, result.upper_bound_s

        lower, upper = interval(500e-9, 15.57e3)
        for delay, doppler in [(250e-9, 15.57e3), (500e-9, 5e3), (60e-9, 2e3)]:
            lo, up = interval(delay, doppler)
            assert lo <= lower and up >= upper
