"""Exception hierarchy shared across the package."""


class TsBaselinesError(Exception):
    """Base class for all package-specific errors."""


class AlignmentError(TsBaselinesError):
    """Window, bin grid, or series starts do not line up."""


class EmptyWindowError(TsBaselinesError):
    """A requested time window has non-positive length."""


class SplitRangeError(TsBaselinesError):
    """A split specification falls outside the series it slices."""


class InsufficientHistoryError(TsBaselinesError):
    """Not enough past observations to produce the requested forecast."""


class ProtocolError(TsBaselinesError):
    """Forecast protocol misuse, e.g. short-term without ground truth."""


class ContractError(TsBaselinesError):
    """An argument violates a documented precondition."""


class DataError(TsBaselinesError):
    """Input data is unusable: non-finite, degenerate, or unparseable."""


class RankDeficiencyError(TsBaselinesError):
    """A regression system is singular beyond what ridge fallback handles."""


class GridExhaustedError(TsBaselinesError):
    """Every candidate in a hyperparameter grid failed to fit."""


class CoverageError(TsBaselinesError):
    """A model is missing from a group that a summary requires."""


class ConfigError(TsBaselinesError):
    """Experiment configuration is invalid."""
