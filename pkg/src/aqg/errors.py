"""Exception types shared across the package.

Each error carries the CLI exit status it maps to: 1 for validation and
I/O problems, 2 for backend/network failures, 64 for command usage errors.
"""


class AqgError(Exception):
    exit_code = 1


class ConfigError(AqgError):
    """Invalid configuration file or option value."""


class CorpusError(AqgError):
    """Corpus file unreadable or violating the document schema."""


class PatternError(AqgError):
    """Malformed PoS pattern string."""


class EvalError(AqgError):
    """Evaluation inputs missing or out of range."""


class BackendError(AqgError):
    """HTTP backend unreachable or returned an unusable response."""

    exit_code = 2


class UsageError(AqgError):
    """Bad command line (unknown flag, missing required flag)."""

    exit_code = 64
