"""Exception taxonomy shared across the package.

Every error that crosses the API/CLI boundary carries a stable ``code``
string; the HTTP layer maps it onto the {"error": code, "message": text}
wire shape.
"""


class TermbaseError(Exception):
    """Base class; ``code`` is the stable machine-readable identifier."""

    code = "internal"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ValidationError(TermbaseError):
    code = "validation"


class ConflictError(TermbaseError):
    code = "conflict"


class NotFoundError(TermbaseError):
    code = "not_found"


class ReferentialError(TermbaseError):
    code = "referential_integrity"


class InvalidQueryError(TermbaseError):
    code = "invalid_query"


class ConfigError(TermbaseError):
    code = "config"


class UnsupportedLanguageError(ConfigError):
    code = "unsupported_language"


class SchemaVersionError(TermbaseError):
    code = "schema_version"


class StoreLockedError(TermbaseError):
    code = "store_locked"


class BackendError(TermbaseError):
    """Mapper backend failed permanently (bad config, exhausted retries)."""

    code = "backend"


class RetryableBackendError(BackendError):
    """Transient backend failure; the entry stays unmapped and can be retried."""

    code = "backend_retryable"
