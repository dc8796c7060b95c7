import os
from typing import Optional

from app.config import settings
from app.exceptions import StorageError

from .base import StorageProvider


class LocalStorageProvider(StorageProvider):
    """Files under the output directory: images/, metadata/ and records/."""

    def __init__(self, base_dir: Optional[str] = None):
        super().__init__("local")
        self.base_dir = base_dir or settings.storage.output_dir
        self.subdirs = {"images": "images", "metadata": "metadata", "records": "records"}

    def _write_bytes(self, directory: str, filename: str, content: bytes) -> str:
        path = os.path.join(self.base_dir, self.subdirs.get(directory, directory), filename)
        try:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, "wb") as handle:
                handle.write(content)
        except OSError as e:
            raise StorageError(f"cannot write {path}: {e}", "error.storage.write", {"path": path})
        return path

    def _read_bytes(self, file_path: str) -> bytes:
        try:
            with open(file_path, "rb") as handle:
                return handle.read()
        except OSError as e:
            raise StorageError(f"cannot read {file_path}: {e}", "error.storage.read", {"path": file_path})

    def _delete(self, file_path: str) -> bool:
        if not os.path.isfile(file_path):
            return False
        try:
            os.remove(file_path)
        except OSError:
            return False
        return True

    def _exists(self, file_path: str) -> bool:
        return os.path.exists(file_path)
