from abc import ABC, abstractmethod
from typing import Iterable, List, Optional, Sequence

from pydantic import BaseModel


class StorageResponse(BaseModel):
    provider: str
    image_path: Optional[str] = None
    metadata_path: Optional[str] = None
    records_path: Optional[str] = None


class StorageProvider(ABC):

    def __init__(self, provider_name: str):
        self.provider_name = provider_name

    # ===== ABSTRACT METHODS =====

    @abstractmethod
    def _write_bytes(self, directory: str, filename: str, content: bytes) -> str:
        pass

    @abstractmethod
    def _read_bytes(self, file_path: str) -> bytes:
        pass

    @abstractmethod
    def _delete(self, file_path: str) -> bool:
        pass

    @abstractmethod
    def _exists(self, file_path: str) -> bool:
        pass

    # ===== CORE OPERATIONS =====

    def save_image(self, content: bytes, name: str) -> str:
        return self._write_bytes("images", f"{name}.ppm", content)

    def save_metadata(self, content: str, name: str) -> str:
        return self._write_bytes("metadata", f"{name}.meta", content.encode("utf-8"))

    def save_records(self, header: Sequence[str], rows: Iterable[Sequence[str]], name: str, version: str, delimiter: str = "\t") -> str:
        return self._write_bytes("records", f"{name}.tsv", render_records(header, rows, version, delimiter).encode("utf-8"))

    def read_bytes(self, file_path: str) -> bytes:
        return self._read_bytes(file_path)

    def read_file(self, file_path: str) -> str:
        return self._read_bytes(file_path).decode("utf-8")

    def delete_file(self, file_path: str) -> bool:
        return self._delete(file_path)

    def file_exists(self, file_path: str) -> bool:
        return self._exists(file_path)

    def get_storage_response(
        self,
        image_path: Optional[str] = None,
        metadata_path: Optional[str] = None,
        records_path: Optional[str] = None,
    ) -> StorageResponse:
        return StorageResponse(
            provider=self.provider_name,
            image_path=image_path,
            metadata_path=metadata_path,
            records_path=records_path,
        )


def render_records(header: Sequence[str], rows: Iterable[Sequence[str]], version: str, delimiter: str = "\t") -> str:
    """Delimited text with a format-version comment and a header row."""
    lines: List[str] = [f"# format-version: {version}", delimiter.join(header)]
    lines.extend(delimiter.join(str(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"
