import json

import numpy as np
import pytest

from app.exceptions import DomainError
from app.processors.basin_processor import INFINITY, ONE, UNDETERMINED
from app.schemas.raster import NON_ESCAPING, RasterSpec, VerdictGrid
from app.schemas.sphere import FamilyParams
from app.schemas.verdict import BasinTestConfig, VerdictKind
from app.services.classification_service import classification_service
from app.services.render_service import RenderService, render_service


def _julia_spec(lam=4.0, size=16, bounds=(-4.0, 6.0, -5.0, 5.0), **kwargs):
    re_min, re_max, im_min, im_max = bounds
    return RasterSpec(
        re_min=re_min,
        re_max=re_max,
        im_min=im_min,
        im_max=im_max,
        width=size,
        height=size,
        mode="dynamical",
        d=2,
        lam_re=complex(lam).real,
        lam_im=complex(lam).imag,
        **kwargs,
    )


def test_undetermined_grid_is_all_black():
    spec = _julia_spec()
    shape = (16, 16)
    grid = VerdictGrid(
        spec=spec,
        codes=np.full(shape, UNDETERMINED, dtype=np.int16),
        iterations=np.zeros(shape, dtype=np.int32),
        exit_modulus=np.zeros(shape),
    )
    image = render_service.encode_image(grid, "paper-bw")
    assert image.startswith(b"P6\n16 16\n255\n")
    assert len(image) == 781
    assert set(image[13:]) == {0}


def test_spec_rejects_an_empty_rectangle():
    with pytest.raises(ValueError):
        _julia_spec(bounds=(1.0, 1.0, -1.0, 1.0))


def test_row_centers_run_top_down():
    spec = _julia_spec()
    top = spec.row_centers(0)
    assert top[0] == pytest.approx(-4.0 + 10.0 / 32 + 1j * (5.0 - 10.0 / 32))
    assert spec.cell_of(top[3]) == (0, 3)


def test_render_is_identical_across_worker_counts():
    spec = _julia_spec(size=24)
    serial = RenderService(workers=1).render(spec)
    pooled = RenderService(workers=2).render(spec)
    assert serial.identical(pooled)
    assert render_service.encode_image(serial, "smooth-escape") == render_service.encode_image(pooled, "smooth-escape")


def test_quasicircle_splits_the_plane_into_two_basins():
    spec = _julia_spec(lam=30.0, size=64, bounds=(-10.0, 16.0, -13.0, 13.0))
    grid = render_service.render(spec)
    report = render_service.component_counts(grid)
    assert ONE in report and INFINITY in report
    assert report[ONE][1] > 0.95
    assert report[INFINITY][1] > 0.95
    assert grid.codes[spec.cell_of(1.0 + 0j)] == ONE


def test_unknown_palette_is_rejected():
    grid = render_service.render(_julia_spec())
    with pytest.raises(DomainError):
        render_service.encode_image(grid, "sepia")


def test_same_grid_gives_the_same_bytes():
    grid = render_service.render(_julia_spec())
    for palette in ("paper-bw", "depth-cycle", "smooth-escape"):
        assert render_service.encode_image(grid, palette) == render_service.encode_image(grid, palette)


def test_write_image_stores_pixmap_and_metadata(memory_storage):
    grid = render_service.render(_julia_spec())
    response = render_service.write_image(grid, "depth-cycle", "julia", storage=memory_storage)
    assert response.provider == "memory"
    assert memory_storage.read_bytes(response.image_path).startswith(b"P6\n")
    metadata = json.loads(memory_storage.read_file(response.metadata_path))
    assert metadata["palette"] == "depth-cycle"
    assert metadata["spec"]["mode"] == "dynamical"
    assert metadata["spec"]["cfg"]["max_iter"] == grid.spec.cfg.max_iter


def test_parameter_cells_match_standalone_verdicts():
    cfg = BasinTestConfig(max_iter=500)
    spec = RasterSpec(
        re_min=3.5, re_max=4.5, im_min=-0.5, im_max=0.5, width=16, height=16, mode="parameter", d=2, cfg=cfg
    )
    grid = render_service.render(spec)
    rng = np.random.default_rng(7)
    for row, col in rng.integers(0, 16, size=(5, 2)):
        lam = spec.row_centers(int(row))[int(col)]
        verdict = classification_service.classify_parameter(FamilyParams.create(2, lam), cfg)
        if verdict.kind == VerdictKind.CAPTURE_DEPTH:
            assert grid.codes[row, col] == verdict.depth
        else:
            assert grid.codes[row, col] == NON_ESCAPING
    assert render_service.colorize(grid, "paper-bw").shape == (16, 16, 3)
