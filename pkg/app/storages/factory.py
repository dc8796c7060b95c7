from typing import Dict, List, Optional, Type

from app.config import settings
from app.exceptions import DomainError

from .base import StorageProvider
from .local_provider import LocalStorageProvider
from .memory_provider import MemoryStorageProvider


class StorageFactory:
    """Maps the --storage names to provider classes."""

    _providers: Dict[str, Type[StorageProvider]] = {
        "local": LocalStorageProvider,
        "memory": MemoryStorageProvider,
    }

    @classmethod
    def register_provider(cls, name: str, provider_class: Type[StorageProvider]) -> None:
        cls._providers[name] = provider_class

    @classmethod
    def create_provider(cls, provider_name: str) -> StorageProvider:
        provider_class = cls._providers.get(provider_name)
        if provider_class is None:
            raise DomainError(
                f"unknown storage provider {provider_name!r}; choose one of {', '.join(cls._providers)}",
                "error.domain.storage",
            )
        return provider_class()

    @classmethod
    def get_available_providers(cls) -> List[str]:
        return sorted(cls._providers)


_storage_provider: Optional[StorageProvider] = None


def get_storage_provider(provider_name: Optional[str] = None) -> StorageProvider:
    """Cached provider; asking for a different name replaces the cache."""
    global _storage_provider
    wanted = provider_name or settings.storage.storage_provider
    if _storage_provider is None or _storage_provider.provider_name != wanted:
        _storage_provider = StorageFactory.create_provider(wanted)
    return _storage_provider


def reset_storage_provider() -> None:
    global _storage_provider
    _storage_provider = None
