"""Exception hierarchy shared by every module."""


class EdaLabError(Exception):
    """Base class for all package errors."""


class ConfigError(EdaLabError, ValueError):
    """A configuration value is missing, malformed or outside its domain."""


class DomainError(EdaLabError, ValueError):
    """A numeric argument lies outside the domain of the formula."""


class ConsistencyError(EdaLabError, RuntimeError):
    """An operator produced a distribution whose mass drifted away from 1."""


class UnsupportedSchemaError(EdaLabError, ValueError):
    """The requested quantity has no formula for this selection schema."""
