from app.schemas.channel import MultipathChannel, PathComponent
from app.schemas.frame import FrameParams
from app.sim.channel import steering_vector


def on_grid_channel(params: FrameParams, delays, dopplers, angles, antennas, gains=None) -> MultipathChannel:
    """Channel built from delays in samples and Dopplers in bins (fractions allowed)."""
    doppler_bin = params.bandwidth_hz / params.num_samples
    gains = gains if gains is not None else [1.0] * len(delays)
    return MultipathChannel(paths=[
        PathComponent(
            delay_s=d / params.bandwidth_hz,
            doppler_hz=k * doppler_bin,
            gain=g * steering_vector(theta, antennas),
        )
        for d, k, theta, g in zip(delays, dopplers, angles, gains)
    ])
