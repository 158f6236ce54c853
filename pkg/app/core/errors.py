"""Exception hierarchy shared by the simulator, the CLI and the HTTP routers."""


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigError(SimulationError):
    """Scenario or command-line configuration could not be parsed or is inconsistent."""


class DimensionError(SimulationError, ValueError):
    """Array shapes or sequence lengths do not match the frame numerology."""


class FeasibilityError(SimulationError):
    """A numerology violates the OTFS period constraints it was checked against."""


class SignalError(SimulationError, ValueError):
    """A signal is unusable for the requested measurement (e.g. all zeros)."""


class AlignmentError(SimulationError):
    """An alignment plan or its beamformers cannot be built."""


class RankError(AlignmentError):
    """Zero-forcing needs at least as many antennas as aligned entries."""


class DegenerateBeamformerError(AlignmentError):
    """A channel vector lies in the span of the others, so it cannot be isolated."""


class NoBinsError(AlignmentError):
    """Bin selection left no delay-Doppler bin to align."""


class BeamformersUnsetError(AlignmentError):
    """Precoding was requested on a plan whose beamformers were never designed."""
