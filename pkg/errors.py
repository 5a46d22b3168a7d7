# errors.py
"""
Error types shared across the DQJL packages
"""


class DQJLError(Exception):
    """Base class for every error raised on purpose by this project"""


class ContractViolation(DQJLError, ValueError):
    """A caller broke an operation's precondition (shape, range, finiteness, slot kind)"""


class ConfigurationError(DQJLError, ValueError):
    """Invalid configuration value or missing configured resource"""


class CapacityError(DQJLError, ValueError):
    """Too many vehicles for the road or for the agent slots"""


class DatasetParseError(DQJLError, ValueError):
    """Malformed dataset record"""

    def __init__(self, message, line_number=None, record_index=None):
        self.line_number = line_number
        self.record_index = record_index
        prefix = []
        if line_number is not None:
            prefix.append(f"line {line_number}")
        if record_index is not None:
            prefix.append(f"record {record_index}")
        if prefix:
            message = f"{', '.join(prefix)}: {message}"
        super().__init__(message)


class FormatVersionError(DQJLError, ValueError):
    """File written by an incompatible format version"""


class BackwardStateError(DQJLError, RuntimeError):
    """Backward pass requested with no recorded forward pass"""


class NumericalError(DQJLError, FloatingPointError):
    """NaN or Inf produced inside the numeric core"""
