"""Exception hierarchy shared across the package."""


class BridgekitError(Exception):
    """Base class for all errors raised by bridgekit."""


class ShapeError(BridgekitError):
    """Tensor shapes do not satisfy an operation's contract."""


class ConfigError(BridgekitError):
    """Invalid or inconsistent configuration."""


class EmptyInputError(BridgekitError):
    """An operation received an empty sequence it cannot process."""


class LengthError(BridgekitError):
    """A sequence exceeds a hard length limit (e.g. decoder context)."""


class NonFiniteError(BridgekitError):
    """A NaN or Inf was produced; message names the offending operation."""


class FrozenTensorError(BridgekitError):
    """Attempted gradient attachment to a frozen tensor."""


class ManifestError(BridgekitError):
    """A dataset manifest is malformed or violates record invariants."""


class AudioError(BridgekitError):
    """A WAV file is malformed or has an unsupported format."""


class CheckpointError(BridgekitError):
    """A checkpoint file is malformed or inconsistent with the config."""


class TrainingDiverged(BridgekitError):
    """Training loss became non-finite; last good checkpoint was kept."""
