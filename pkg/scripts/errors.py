"""Exceptions raised across the audit toolkit"""


class AuditError(Exception):
    """Base class for every error the toolkit raises on purpose"""


class ValidationError(AuditError):
    """Input values break a documented precondition"""


class SchemaError(ValidationError):
    """A dataset schema or CSV header does not line up"""

    def __init__(self, message: str, column: str = None):
        super().__init__(message)
        self.column = column


class ConfigError(ValidationError):
    """Configuration file or command-line value is invalid"""

    def __init__(self, message: str, token: str = None):
        super().__init__(message)
        self.token = token


class SamplingError(AuditError):
    """A requested draw is infeasible for the pool it is drawn from"""

    def __init__(self, message: str, stratum: str = None, shortfall: int = 0):
        super().__init__(message)
        self.stratum = stratum
        self.shortfall = shortfall


class FitError(AuditError):
    """A model cannot serve the requested operation"""
