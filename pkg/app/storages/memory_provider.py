from typing import Dict

from app.exceptions import StorageError

from .base import StorageProvider


class MemoryStorageProvider(StorageProvider):
    """Keeps written files in a dict keyed by "directory/filename"."""

    def __init__(self):
        super().__init__("memory")
        self.files: Dict[str, bytes] = {}

    def _write_bytes(self, directory: str, filename: str, content: bytes) -> str:
        path = f"{directory}/{filename}"
        self.files[path] = bytes(content)
        return path

    def _read_bytes(self, file_path: str) -> bytes:
        if file_path not in self.files:
            raise StorageError(f"no such file: {file_path}", "error.storage.read", {"path": file_path})
        return self.files[file_path]

    def _delete(self, file_path: str) -> bool:
        return self.files.pop(file_path, None) is not None

    def _exists(self, file_path: str) -> bool:
        return file_path in self.files
