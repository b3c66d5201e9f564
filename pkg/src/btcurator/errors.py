"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
ProviderError -> 3.
"""


class BtcuratorError(Exception):
    pass


class ConfigError(BtcuratorError):
    """Bad or inconsistent run configuration."""


class DataError(BtcuratorError):
    """Unusable input data (missing files, empty corpora, malformed rows)."""


class ProviderError(BtcuratorError):
    """A pluggable provider (translator, embedder) failed."""
