"""Exception hierarchy shared across the toolkit."""


class ChromasentError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ChromasentError):
    """Invalid configuration: bad paths, empty color model, missing stages."""


class InputError(ChromasentError):
    """Invalid input data: undecodable image, non-finite number, etc."""


class EmptyImageError(InputError):
    """No pixels remain after preprocessing."""


class IngestError(ChromasentError):
    """File-level or row-level ingestion failure."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class StoreError(ChromasentError):
    """Pipeline record store failure (unwritable directory, schema mismatch)."""


class SourceError(ChromasentError):
    """Review source failed permanently; carries the affected company id."""

    def __init__(self, message: str, company_id: int | None = None):
        super().__init__(message)
        self.company_id = company_id


class TransientSourceError(ChromasentError):
    """Retryable review-source failure (rate limit, timeout)."""


class PayloadError(SourceError):
    """Remote review payload did not match the expected schema."""
