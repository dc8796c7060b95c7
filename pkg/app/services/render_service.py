import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np
from PIL import Image
from pydantic import BaseModel
from scipy import ndimage

from app.config import settings
from app.exceptions import DomainError, PottsError
from app.processors.basin_processor import INFINITY, ONE, basin_processor
from app.schemas.raster import DEGENERATE, NON_ESCAPING, PALETTES, RasterSpec, VerdictGrid
from app.schemas.sphere import FamilyParams
from app.schemas.verdict import VerdictKind
from app.services.classification_service import classification_service
from app.storages import StorageProvider, StorageResponse, get_storage_provider

logger = logging.getLogger(__name__)

UNRESOLVED = -3

_DEPTH_CYCLE = np.array(
    [
        (255, 255, 255),
        (230, 85, 13),
        (49, 130, 189),
        (49, 163, 84),
        (117, 107, 177),
        (222, 45, 38),
        (253, 174, 107),
        (158, 202, 225),
    ],
    dtype=np.uint8,
)


class ImageMetadata(BaseModel):
    format_version: str
    palette: str
    spec: RasterSpec


# ===== ROW WORKERS =====

def _dynamical_row(spec: RasterSpec, row: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    cfg = spec.cfg
    lam = complex(spec.lam_re, spec.lam_im)
    codes, iters, modulus = basin_processor.classify_array(
        lam, spec.d, spec.row_centers(row), cfg.attract_eps, cfg.escape_R, cfg.max_iter
    )
    return codes.astype(np.int16), iters.astype(np.int32), modulus


def _parameter_row(spec: RasterSpec, row: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    centers = spec.row_centers(row)
    codes = np.empty(spec.width, dtype=np.int16)
    iters = np.zeros(spec.width, dtype=np.int32)
    for col, lam in enumerate(centers):
        p = FamilyParams.create(spec.d, lam, degenerate=bool(lam == 0))
        try:
            verdict = classification_service.classify_parameter(p, spec.cfg)
        except PottsError as e:
            logger.debug(f"Unresolved parameter cell {lam}: {e}")
            codes[col] = UNRESOLVED
            continue
        if verdict.kind == VerdictKind.CAPTURE_DEPTH:
            codes[col] = verdict.depth
        elif verdict.kind == VerdictKind.NON_ESCAPING:
            codes[col] = NON_ESCAPING
        else:
            codes[col] = DEGENERATE
        iters[col] = verdict.iterations_used
    return codes, iters, np.zeros(spec.width)


def render_rows(spec_data: dict, rows: List[int]) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Module-level so process pools can pickle it; each row is computed on its own."""
    spec = RasterSpec(**spec_data)
    worker = _dynamical_row if spec.mode == "dynamical" else _parameter_row
    return [worker(spec, row) for row in rows]


def _render_rows_args(args):
    return render_rows(*args)


class RenderService:
    """Verdict rasters of the dynamical and parameter planes and their pixmap output."""

    def __init__(self, workers: Optional[int] = None):
        self.config = settings.render
        self.workers = workers

    def render(self, spec: RasterSpec, workers: Optional[int] = None) -> VerdictGrid:
        workers = workers or self.workers or settings.workers
        rows = list(range(spec.height))
        spec_data = spec.model_dump()
        logger.info(f"Rendering {spec.mode} raster {spec.width}x{spec.height} with {workers} worker(s)")

        if workers <= 1:
            results = render_rows(spec_data, rows)
        else:
            chunk = max(1, math.ceil(spec.height / (4 * workers)))
            blocks = [rows[i:i + chunk] for i in range(0, spec.height, chunk)]
            with ProcessPoolExecutor(max_workers=workers) as executor:
                results = [r for block in executor.map(_render_rows_args, [(spec_data, b) for b in blocks]) for r in block]

        return VerdictGrid(
            spec=spec,
            codes=np.stack([r[0] for r in results]),
            iterations=np.stack([r[1] for r in results]),
            exit_modulus=np.stack([r[2] for r in results]),
        )

    # ===== COLORING =====

    def colorize(self, grid: VerdictGrid, palette: str) -> np.ndarray:
        if palette not in PALETTES:
            raise DomainError(f"unknown palette {palette!r}; choose one of {', '.join(PALETTES)}", "error.domain.palette")
        codes, iters = grid.codes, grid.iterations
        rgb = np.zeros(codes.shape + (3,), dtype=np.uint8)

        if grid.spec.mode == "parameter":
            captured = codes >= 0
            if palette == "paper-bw":
                rgb[captured & (codes == 0)] = (255, 255, 255)
                rgb[captured & (codes > 0)] = (190, 190, 190)
            else:
                rgb[captured] = _DEPTH_CYCLE[codes[captured] % len(_DEPTH_CYCLE)]
            return rgb

        one = codes == ONE
        inf = codes == INFINITY
        if palette == "paper-bw":
            rgb[one] = (255, 255, 255)
            rgb[inf] = (160, 160, 160)
            return rgb

        shade = 1.0 - 0.7 * np.minimum(iters, 64) / 64.0
        if palette == "smooth-escape":
            shade = np.where(inf, 1.0 - 0.7 * np.clip((iters - self.smooth_value(grid)) / 64.0, 0.0, 1.0), shade)
        rgb[one] = np.stack([40 * shade[one], 110 * shade[one], 255 * shade[one]], axis=-1).astype(np.uint8)
        rgb[inf] = np.stack([255 * shade[inf], 160 * shade[inf], 40 * shade[inf]], axis=-1).astype(np.uint8)
        return rgb

    def smooth_value(self, grid: VerdictGrid) -> np.ndarray:
        """log_d(log|w| / log R) clamped to [0, 1] at the escape iterate."""
        R = grid.spec.cfg.escape_R
        with np.errstate(all="ignore"):
            ratio = np.log(grid.exit_modulus) / math.log(R)
            value = np.log(ratio) / math.log(grid.spec.d)
        return np.clip(np.nan_to_num(value, nan=1.0, posinf=1.0, neginf=0.0), 0.0, 1.0)

    # ===== OUTPUT =====

    def encode_image(self, grid: VerdictGrid, palette: str) -> bytes:
        buffer = io.BytesIO()
        Image.fromarray(self.colorize(grid, palette), "RGB").save(buffer, format="PPM")
        return buffer.getvalue()

    def metadata(self, grid: VerdictGrid, palette: str) -> str:
        return ImageMetadata(format_version=self.config.format_version, palette=palette, spec=grid.spec).model_dump_json(indent=2)

    def write_image(self, grid: VerdictGrid, palette: str, name: str, storage: Optional[StorageProvider] = None) -> StorageResponse:
        storage = storage or get_storage_provider()
        image_path = storage.save_image(self.encode_image(grid, palette), name)
        metadata_path = storage.save_metadata(self.metadata(grid, palette), name)
        logger.info(f"Wrote {image_path} and {metadata_path}")
        return storage.get_storage_response(image_path=image_path, metadata_path=metadata_path)

    # ===== TOPOLOGY PROXIES =====

    def component_counts(self, grid: VerdictGrid) -> Dict[int, Tuple[int, float]]:
        """Per code: number of 4-connected components and the share of cells in the largest one."""
        report: Dict[int, Tuple[int, float]] = {}
        for code in np.unique(grid.codes):
            labels, count = ndimage.label(grid.codes == code)
            sizes = np.bincount(labels.ravel())[1:]
            report[int(code)] = (int(count), float(sizes.max() / sizes.sum()))
        return report


render_service = RenderService()
