from .base import StorageProvider, StorageResponse, render_records
from .factory import StorageFactory, get_storage_provider, reset_storage_provider
from .local_provider import LocalStorageProvider
from .memory_provider import MemoryStorageProvider

__all__ = [
    "StorageProvider",
    "StorageResponse",
    "StorageFactory",
    "get_storage_provider",
    "reset_storage_provider",
    "render_records",
    "LocalStorageProvider",
    "MemoryStorageProvider",
]
