import os

import pytest

from app.exceptions import DomainError, StorageError
from app.storages import LocalStorageProvider, MemoryStorageProvider, StorageFactory, render_records


def test_render_records_has_version_and_header():
    text = render_records(["a", "b"], [["1", "2"], ["3", "4"]], "1")
    assert text == "# format-version: 1\na\tb\n1\t2\n3\t4\n"


def test_memory_provider_round_trip(memory_storage):
    path = memory_storage.save_records(["x"], [["0.5"]], "fixed", "1")
    assert path == "records/fixed.tsv"
    assert memory_storage.file_exists(path)
    assert memory_storage.read_file(path).splitlines()[-1] == "0.5"
    assert memory_storage.delete_file(path)
    assert not memory_storage.file_exists(path)
    with pytest.raises(StorageError):
        memory_storage.read_file(path)


def test_local_provider_writes_under_the_output_dir(tmp_path):
    provider = LocalStorageProvider(base_dir=str(tmp_path))
    image = provider.save_image(b"P6\n", "julia")
    metadata = provider.save_metadata("{}", "julia")
    assert image == os.path.join(str(tmp_path), "images", "julia.ppm")
    assert provider.read_bytes(image) == b"P6\n"
    assert provider.read_file(metadata) == "{}"
    response = provider.get_storage_response(image_path=image, metadata_path=metadata)
    assert response.provider == "local"
    assert response.records_path is None


def test_local_provider_read_of_missing_file(tmp_path):
    provider = LocalStorageProvider(base_dir=str(tmp_path))
    with pytest.raises(StorageError):
        provider.read_bytes(str(tmp_path / "missing.ppm"))
    assert provider.delete_file(str(tmp_path / "missing.ppm")) is False


def test_unknown_provider_is_rejected():
    with pytest.raises(DomainError):
        StorageFactory.create_provider("s3")
    assert set(StorageFactory.get_available_providers()) >= {"local", "memory"}


def test_registered_provider_can_be_created(monkeypatch):
    monkeypatch.setattr(StorageFactory, "_providers", dict(StorageFactory._providers))
    StorageFactory.register_provider("scratch", MemoryStorageProvider)
    assert isinstance(StorageFactory.create_provider("scratch"), MemoryStorageProvider)
