"""Shared exception families; the CLI maps each family to a distinct exit code."""


class SmiganError(Exception):
    """Base class for all package errors."""


class ConfigError(SmiganError):
    """Invalid configuration or command usage."""


class DataError(SmiganError):
    """Dataset ingestion, labeling, or sampling problems."""


class ArtifactError(SmiganError):
    """Missing or inconsistent persisted artifacts."""


class MissingArtifact(ArtifactError):
    pass


class ConfigHashMismatch(ArtifactError):
    pass


class NonFiniteLoss(SmiganError):
    """Training aborted on a non-finite loss; carries a diagnostic dump path."""

    def __init__(self, message: str, dump_path: str | None = None):
        super().__init__(message)
        self.dump_path = dump_path
