from typing import Any, Dict, Optional

from app.schemas.message import MessageResponse


class PottsError(Exception):
    """Base error. Carries a translatable message payload and a CLI exit code."""

    exit_code = 3
    default_key = "error.internal"

    def __init__(self, message: str, translation_key: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.detail = MessageResponse.create(translation_key or self.default_key, message)
        self.details = details or {}


class DomainError(PottsError):
    exit_code = 1
    default_key = "error.domain"


class IndeterminateError(PottsError):
    exit_code = 2
    default_key = "error.indeterminate"


class NumericalError(PottsError):
    exit_code = 3
    default_key = "error.numerical"


class StorageError(PottsError):
    exit_code = 3
    default_key = "error.storage"
