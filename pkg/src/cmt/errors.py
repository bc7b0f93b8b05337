"""Exception hierarchy shared across the package."""


class CmtError(Exception):
    """Base class for every error this package raises deliberately."""


class MissingKey(CmtError):
    """No master key could be found in the environment or key file."""


class MalformedKey(CmtError):
    """Master key material is not exactly 32 hex characters."""


class InvalidTenantId(CmtError):
    """Tenant id is empty, too long, or contains forbidden characters."""


class PaddingError(CmtError):
    """PKCS#7 padding structure is invalid."""


class FieldTooLarge(CmtError):
    """A field plaintext exceeds the store-level size cap."""


class AuthError(CmtError):
    """Authentication tag mismatch: wrong key or tampered ciphertext."""


class StoreError(CmtError):
    """Base class for record-store failures."""


class AlreadyExists(StoreError):
    """Store file already exists at the given path."""


class InvalidSchema(StoreError):
    """Table schema violates naming or uniqueness rules."""


class CorruptHeader(StoreError):
    """Store file header line cannot be parsed."""


class VersionMismatch(StoreError):
    """Store file was written by an unsupported format version."""


class CorruptLog(StoreError):
    """A non-trailing log line cannot be parsed or replayed."""


class SchemaMismatch(StoreError):
    """Supplied field set does not match the table schema exactly."""


class NotFound(StoreError):
    """No live row with the requested id."""


class IsolationDenied(StoreError):
    """The row exists but belongs to a different tenant."""


class StoreLocked(StoreError):
    """Another process holds the advisory lock on this store."""
