"""Exception types shared across the analyzer."""


class ConfigurationError(Exception):
    """Bad user input: missing roots, unwritable outputs, unknown entries."""


class AnalysisError(Exception):
    """Internal contract violation during analysis (e.g. cyclic hierarchy)."""
