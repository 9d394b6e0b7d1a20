"""Exception hierarchy for the search engine.

CLI exit-code mapping: usage problems exit 2 (argparse), subclasses of
DataError exit 3, OS-level I/O failures exit 4.
"""


class MvsError(Exception):
    """Base class for all engine errors."""


class DataError(MvsError):
    """Invalid data or configuration (CLI exit code 3)."""


class ImageTooSmallError(DataError):
    pass


class PatchOutOfBoundsError(DataError):
    """Descriptor patch does not fit the image after the clamp rule."""


class FileFormatError(DataError):
    """Corrupt or mismatched binary file.

    ``kind`` is one of: bad-magic, bad-version, truncated, trailing, corrupt.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class TooFewDescriptorsError(DataError):
    pass


class ChannelMismatchError(DataError):
    """Descriptor channel does not match the vocabulary channel."""


class LengthMismatchError(DataError):
    pass


class EmptyInputError(DataError):
    pass


class InconsistentUniverseError(DataError):
    """Per-query score lists do not cover the same database images."""


class DuplicateObjectIdError(DataError):
    pass


class SpecInvalidError(DataError):
    """Query spec is malformed or incompatible with the store."""


class EmptyStoreError(DataError):
    pass


class ListTooShortError(DataError):
    pass


class ManifestError(DataError):
    pass


# Service-level errors, mapped to HTTP statuses by the API layer.


class ServiceError(MvsError):
    status = 400
    code = "bad-request"


class BadSpecError(ServiceError):
    status = 400
    code = "bad-spec"


class MalformedPayloadError(ServiceError):
    status = 400
    code = "malformed-payload"


class EmptySessionError(ServiceError):
    status = 400
    code = "empty-session"


class UnknownSessionError(ServiceError):
    status = 404
    code = "unknown-session"


class UnknownObjectError(ServiceError):
    status = 404
    code = "unknown-object"


class SessionFinalizedError(ServiceError):
    status = 409
    code = "session-finalized"


class NoIndexError(ServiceError):
    status = 503
    code = "no-index"
