"""Domain error hierarchy shared across modules.

Every error carries a stable machine code drawn from a closed set; the
gateway maps codes to HTTP statuses deterministically.
"""

from __future__ import annotations


class DomainError(Exception):
    code = "DOMAIN_ERROR"

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class ValidationError(DomainError):
    code = "VALIDATION"


class ParseError(ValidationError):
    code = "PARSE"


class InvalidInputError(ValidationError):
    code = "INVALID_INPUT"


class NotFoundError(DomainError):
    code = "NOT_FOUND"


class NotEligibleError(DomainError):
    code = "NOT_ELIGIBLE"


class SessionOpenError(DomainError):
    code = "SESSION_OPEN"


class SessionClosedError(DomainError):
    code = "SESSION_CLOSED"


class InvalidTemplateError(DomainError):
    code = "INVALID_TEMPLATE"


class StaleVersionError(DomainError):
    code = "STALE_VERSION"


class FormatError(DomainError):
    code = "FORMAT"


class DimensionError(DomainError):
    code = "DIMENSION"


class MixedDimensionsError(DomainError):
    code = "MIXED_DIMENSIONS"


class IndexOutOfRangeError(DomainError):
    code = "INDEX_OUT_OF_RANGE"


# deterministic error-code -> HTTP-status mapping used by the gateway
HTTP_STATUS = {
    "VALIDATION": 400,
    "PARSE": 400,
    "INVALID_INPUT": 400,
    "FORMAT": 400,
    "DIMENSION": 400,
    "MIXED_DIMENSIONS": 400,
    "NOT_FOUND": 404,
    "INDEX_OUT_OF_RANGE": 404,
    "NOT_ELIGIBLE": 409,
    "SESSION_OPEN": 409,
    "SESSION_CLOSED": 409,
    "STALE_VERSION": 409,
    "INVALID_TEMPLATE": 422,
    "NO_FOREGROUND": 422,
    "DOMAIN_ERROR": 400,
}
