"""Tests for the sampled multipath channel and its delay-Doppler bin response."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from app.core.errors import DimensionError
from app.schemas.channel import ChannelGenConfig, MultipathChannel, PathComponent, PulseShape
from app.schemas.frame import FrameParams
from app.sim.channel import (
    CHANNEL_STREAM,
    DATA_STREAM,
    NOISE_STREAM,
    apply_channel,
    bin_channel_response,
    decompose,
    doppler_kernel,
    kmh_to_mps,
    random_channel,
    rng_for,
    steering_vector,
)
from tests.helpers import on_grid_channel


def reference_channel(s, channel, half_width, params):
    """Direct double sum over paths and sinc taps, one output sample at a time.

    Delay and Doppler are split into integer and fractional parts here rather than through
    the code under test.
    """
    MN = params.num_samples
    B = params.bandwidth_hz
    y = np.zeros(MN, dtype=complex)
    for path in channel.paths:
        l_p = path.delay_s * B
        l_int = int(math.floor(l_p + 0.5))
        l_frac = l_p - l_int
        k_p = path.doppler_hz * MN / B
        for n in range(MN):
            acc = 0j
            for z in range(-half_width, half_width + 1):
                u = z - l_frac
                tap = math.sin(math.pi * u) / (math.pi * u) if u != 0 else 1.0
                acc += np.vdot(path.gain, s[:, (n - z - l_int) % MN]) * tap
            y[n] += acc * np.exp(2j * np.pi * k_p * n / MN)
    return y


class TestDecompose:

    def test_integer_and_fractional_parts(self):
        params = FrameParams.from_grid(64e6, 128, 16)
        sp = decompose(100e-9, 1000.0, params)
        assert sp.delay_int == 6
        assert sp.delay_frac == pytest.approx(0.4)
        assert sp.doppler_bins == pytest.approx(1000.0 * 2048 / 64e6)
        assert sp.delay_int + sp.delay_frac == sp.delay_samples

    def test_on_grid_values_snap(self):
        params = FrameParams.from_grid(64e6, 128, 16)
        sp = decompose(500e-9, 0.0, params)
        assert (sp.delay_int, sp.delay_frac) == (32, 0.0)

    def test_half_sample_rounds_up(self):
        params = FrameParams.from_grid(1e6, 16, 4)
        sp = decompose(2.5e-6, -1.5 * params.bandwidth_hz / params.num_samples, params)
        assert -0.5 <= sp.delay_frac < 0.5
        assert -0.5 <= sp.doppler_frac < 0.5
        assert sp.delay_int + sp.delay_frac == sp.delay_samples


class TestRandomChannel:

    def test_seed_reproducibility(self):
        cfg = ChannelGenConfig(rng_seed=11, antennas=8)
        a, b = random_channel(cfg), random_channel(cfg)
        npt.assert_array_equal(a.gains, b.gains)

    def test_geometry_does_not_depend_on_antenna_count(self):
        small = random_channel(ChannelGenConfig(rng_seed=3, antennas=4))
        large = random_channel(ChannelGenConfig(rng_seed=3, antennas=32))
        assert [p.delay_s for p in small.paths] == [p.delay_s for p in large.paths]
        npt.assert_allclose(large.gains[:, :4], small.gains)

    def test_draws_respect_the_limits(self):
        cfg = ChannelGenConfig(rng_seed=5, num_paths=50)
        channel = random_channel(cfg)
        nu_max = cfg.carrier_hz * cfg.max_speed_mps / 299792458.0
        assert all(0 <= p.delay_s <= cfg.max_delay_s for p in channel.paths)
        assert all(abs(p.doppler_hz) <= nu_max for p in channel.paths)

    def test_average_gain_is_normalised(self):
        """E[sum_p ||h_p||^2 / M_t] = 1."""
        totals = [
            np.sum(np.abs(random_channel(ChannelGenConfig(rng_seed=s, antennas=4)).gains) ** 2) / 4
            for s in range(2000)
        ]
        assert np.mean(totals) == pytest.approx(1.0, abs=0.05)

    def test_static_scatterers(self):
        channel = random_channel(ChannelGenConfig(rng_seed=1, max_speed_mps=0.0))
        assert all(p.doppler_hz == 0 for p in channel.paths)

    def test_snap_to_grid(self):
        params = FrameParams.from_grid(64e6, 128, 16)
        channel = random_channel(ChannelGenConfig(rng_seed=2, snap_to_grid=True), params)
        for path in channel.paths:
            sp = decompose(path.delay_s, path.doppler_hz, params)
            assert sp.delay_frac == 0 and sp.doppler_frac == 0

    def test_streams_are_independent(self):
        """Channel, data and noise draws of one trial never share random bits."""
        streams = (CHANNEL_STREAM, DATA_STREAM, NOISE_STREAM)
        first = [rng_for(7, stream).integers(0, 2**32, size=8) for stream in streams]
        assert not np.array_equal(first[0], first[1])
        assert not np.array_equal(first[1], first[2])
        assert not np.array_equal(first[0], first[2])
        npt.assert_array_equal(rng_for(7, DATA_STREAM).integers(0, 2**32, size=8), first[1])

    def test_json_round_trip(self):
        channel = random_channel(ChannelGenConfig(rng_seed=9, antennas=3))
        restored = MultipathChannel.from_json(channel.to_json())
        npt.assert_array_equal(restored.gains, channel.gains)

    def test_kmh(self):
        assert kmh_to_mps(300) == pytest.approx(83.3333333)


class TestApplyChannel:

    def test_matches_direct_sum(self, rng):
        """Five paths with fractional delays and Dopplers on a 4-antenna, 256-sample frame."""
        params = FrameParams.from_grid(1e6, 32, 8)
        delays = [0.3, 2.7, 5.45, 9.1, 14.8]
        dopplers = [0.4, -1.3, 2.25, -3.6, 1.7]
        channel = MultipathChannel(paths=[
            PathComponent(
                delay_s=d / params.bandwidth_hz,
                doppler_hz=k * params.bandwidth_hz / params.num_samples,
                gain=rng.standard_normal(4) + 1j * rng.standard_normal(4),
            )
            for d, k in zip(delays, dopplers)
        ])
        s = rng.standard_normal((4, 256)) + 1j * rng.standard_normal((4, 256))
        y = apply_channel(s, channel, PulseShape(half_width=8), 0.0, params)
        npt.assert_allclose(y, reference_channel(s, channel, 8, params), atol=1e-10)

    def test_linear_in_the_signal(self, small_params, rng):
        channel = on_grid_channel(small_params, [1.3, 4.0, 6.6], [0.4, -1.0, 1.2], [0.2, -0.7, 0.9], 3)
        pulse = PulseShape(half_width=6)
        s1 = rng.standard_normal((3, 64)) + 1j * rng.standard_normal((3, 64))
        s2 = rng.standard_normal((3, 64)) + 1j * rng.standard_normal((3, 64))
        a, b = 0.7 - 1.2j, -2.0 + 0.4j
        combined = apply_channel(a * s1 + b * s2, channel, pulse, 0.0, small_params)
        separate = (a * apply_channel(s1, channel, pulse, 0.0, small_params)
                    + b * apply_channel(s2, channel, pulse, 0.0, small_params))
        npt.assert_allclose(combined, separate, atol=1e-12)

    def test_noise_variance(self):
        params = FrameParams.from_grid(1e6, 64, 64)
        channel = on_grid_channel(params, [0], [0], [0.0], 1)
        y = apply_channel(np.zeros((1, 4096)), channel, PulseShape(), 1e-6, params, rng_seed=4)
        assert np.mean(np.abs(y) ** 2) == pytest.approx(1.0, rel=0.08)
        npt.assert_array_equal(y, apply_channel(np.zeros((1, 4096)), channel, PulseShape(), 1e-6, params, rng_seed=4))

    def test_linear_edges_do_not_wrap(self, small_params):
        channel = on_grid_channel(small_params, [3], [0], [0.0], 1)
        s = np.zeros((1, 64), dtype=complex)
        s[0, -1] = 1
        cyclic = apply_channel(s, channel, PulseShape(), 0.0, small_params)
        linear = apply_channel(s, channel, PulseShape(), 0.0, small_params, linear_edges=True)
        assert abs(cyclic[2]) == pytest.approx(1.0)
        npt.assert_allclose(linear, 0, atol=1e-15)

    def test_rejects_bad_inputs(self, small_params):
        channel = on_grid_channel(small_params, [1], [0], [0.0], 2)
        with pytest.raises(DimensionError):
            apply_channel(np.zeros((3, 64)), channel, PulseShape(), 0.0, small_params)
        with pytest.raises(ValueError):
            apply_channel(np.zeros((2, 64)), channel, PulseShape(), -1.0, small_params)


class TestDopplerKernel:

    def test_matches_the_geometric_sum(self):
        N = 8
        for d in (0.3, -2.7, 4.5, 11.1):
            direct = np.sum(np.exp(-2j * np.pi * d * np.arange(N) / N))
            assert complex(doppler_kernel(d, N)) == pytest.approx(direct)

    def test_limit_and_zeros(self):
        assert doppler_kernel(0.0, 8) == 8
        assert doppler_kernel(8.0, 8) == 8
        assert doppler_kernel(3.0, 8) == 0
        assert abs(complex(doppler_kernel(0.5, 8))) == pytest.approx(1 / np.sin(np.pi / 16))


class TestBinResponse:

    def test_single_integer_path(self, small_params):
        """One on-grid path occupies exactly one bin, with weight N."""
        channel = on_grid_channel(small_params, [5], [-1], [0.3], 4)
        bins = bin_channel_response(channel, PulseShape(), small_params)
        power = bins.power()
        k, j = np.unravel_index(np.argmax(power), power.shape)
        assert (k, j - bins.delay_offset) == (3, 5)
        npt.assert_allclose(bins.at(-1, 5), 4 * channel.paths[0].gain)
        power[k, j] = 0
        assert power.max() < 1e-20

    def test_energy_of_a_fractional_path(self, small_params):
        """sum ||h_bin||^2 / N^2 = ||h||^2 * sum_z p(z - l_pf)^2."""
        pulse = PulseShape(half_width=6)
        channel = on_grid_channel(small_params, [3.35], [0.7], [0.1], 4)
        bins = bin_channel_response(channel, pulse, small_params)
        sp = decompose(channel.paths[0].delay_s, channel.paths[0].doppler_hz, small_params)
        expected = np.sum(np.abs(channel.paths[0].gain) ** 2) * np.sum(pulse.taps(sp.delay_frac) ** 2)
        assert np.sum(bins.power()) / 16 == pytest.approx(expected, rel=1e-10)

    def test_acausal_taps_are_kept(self, small_params):
        channel = on_grid_channel(small_params, [0.4], [0], [0.0], 1)
        bins = bin_channel_response(channel, PulseShape(half_width=4), small_params)
        assert bins.delays[0] == -4
        assert np.linalg.norm(bins.at(0, -1)) > 0
        npt.assert_array_equal(bins.at(0, -10), np.zeros(1))

    def test_pulse_evaluated_in_seconds(self):
        pulse = PulseShape()
        T = 1e-6
        npt.assert_allclose(pulse.evaluate([0.0, 0.5e-6, 2e-6], T), [1.0, 2 / np.pi, 0.0], atol=1e-15)
        rrc = PulseShape(kind="root_raised_cosine", rolloff=0.25)
        assert float(rrc.evaluate(0.0, T)) == pytest.approx(1.0)
        npt.assert_allclose(rrc.evaluate([0.3e-6, -0.3e-6], T), rrc.at_samples([0.3, -0.3]))

    def test_steering_vector_is_unit_modulus(self):
        a = steering_vector(0.4, 16)
        npt.assert_allclose(np.abs(a), 1.0)
        assert a[0] == 1
