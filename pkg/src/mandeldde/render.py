"""Parameter-plane sweeps, class rasters and their images.

Every pixel is classified on its own; workers only receive the immutable
job description and a block of pixel indices, and the raster is assembled
by index.  Output bytes therefore do not depend on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .dynamics import DdeConfig, DiscreteParams, OrbitKind

WORKERS_ENV = "MANDELDDE_WORKERS"

# Full-set frame and the period-2 bulb window used by the decay experiment.
DEFAULT_FRAME = (-2.0, 0.75, -1.25, 1.25)
BULB_WINDOW = (-1.4, -0.9, -0.25, 0.25)


@dataclass(frozen=True)
class GridSpec:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("grid bounds must satisfy min < max")
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be >= 1")

    def re_values(self) -> np.ndarray:
        i = np.arange(self.width, dtype=float)
        return self.re_min + (i + 0.5) * (self.re_max - self.re_min) / self.width

    def im_values(self) -> np.ndarray:
        j = np.arange(self.height, dtype=float)
        return self.im_max - (j + 0.5) * (self.im_max - self.im_min) / self.height

    def pixel_c(self, i: int, j: int) -> complex:
        return complex(self.re_values()[i], self.im_values()[j])

    def to_pixel(self, c: complex) -> tuple[int, int]:
        """Pixel (i, j) containing ``c``; may fall outside the grid."""
        x, y = _pixel_coords(self, c)
        return math.floor(x), math.floor(y)

    def to_dict(self) -> dict:
        return {"re_min": self.re_min, "re_max": self.re_max, "im_min": self.im_min,
                "im_max": self.im_max, "width": self.width, "height": self.height}


@dataclass
class ClassRaster:
    """Per-pixel class codes (rows top to bottom) and their scalar diagnostics."""

    classes: np.ndarray
    scalars: np.ndarray
    flags: np.ndarray
    scalar_max: float

    @property
    def width(self) -> int:
        return self.classes.shape[1]

    @property
    def height(self) -> int:
        return self.classes.shape[0]


@dataclass(frozen=True)
class PaletteSpec:
    ramp_max: float | None = None
    converged: tuple[int, int, int] = (0, 0, 0)
    oscillating: tuple[int, int, int] = (128, 128, 128)
    undecided: tuple[int, int, int] = (64, 64, 64)


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def _job(args):
    mode, c_re, c_im, params = args
    kinds = np.empty(c_re.size, dtype=np.uint8)
    scalars = np.empty(c_re.size)
    flags = np.empty(c_re.size, dtype=np.uint8)
    if mode == "dde":
        n_delay, dt, n_steps, radius, window, tol = params
        K.render_dde_chunk(c_re, c_im, n_delay, dt, n_steps, radius, window, tol,
                           kinds, scalars, flags)
    else:
        max_iter, radius, tol = params
        K.render_discrete_chunk(c_re, c_im, max_iter, radius, tol, kinds, scalars, flags)
    return kinds, scalars, flags


def render_grid(grid: GridSpec, mode: str = "discrete",
                config: DdeConfig | DiscreteParams | None = None,
                workers: int | None = None) -> ClassRaster:
    """Classify every pixel centre of ``grid``.

    ``mode`` is ``"discrete"`` (iterate the map) or ``"dde"`` (integrate
    and classify the delay equation).  Worker count comes from the
    argument, else ``$MANDELDDE_WORKERS``, else all cores.
    """
    if mode == "discrete":
        config = config or DiscreteParams()
        params = (config.max_iter, config.escape_radius, config.conv_tol)
        scalar_max = float(config.max_iter)
    elif mode == "dde":
        config = config or DdeConfig()
        params = (config.n_delay, config.dt, config.n_steps, config.escape_radius,
                  config.window, config.conv_tol)
        scalar_max = float(config.n_steps * config.dt)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    re_grid, im_grid = np.meshgrid(grid.re_values(), grid.im_values())
    c_re = np.ascontiguousarray(re_grid.ravel())
    c_im = np.ascontiguousarray(im_grid.ravel())
    n = c_re.size
    workers = min(resolve_workers(workers), n)

    blocks = np.array_split(np.arange(n), workers * 4 if workers > 1 else 1)
    jobs = [(mode, c_re[b], c_im[b], params) for b in blocks if b.size]
    if workers == 1:
        results = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, jobs))

    kinds = np.empty(n, dtype=np.uint8)
    scalars = np.empty(n)
    flags = np.empty(n, dtype=np.uint8)
    for b, (k, s, f) in zip((b for b in blocks if b.size), results):
        kinds[b], scalars[b], flags[b] = k, s, f
    shape = (grid.height, grid.width)
    return ClassRaster(kinds.reshape(shape), scalars.reshape(shape), flags.reshape(shape),
                       scalar_max)


def colorize(raster: ClassRaster, palette: PaletteSpec | None = None) -> np.ndarray:
    """RGB uint8 image: escape pixels on a gray ramp, other classes flat."""
    palette = palette or PaletteSpec()
    ramp_max = palette.ramp_max or raster.scalar_max or 1.0
    img = np.zeros((raster.height, raster.width, 3), dtype=np.uint8)
    escaped = raster.classes == OrbitKind.ESCAPED
    level = np.clip(np.nan_to_num(raster.scalars / ramp_max), 0.0, 1.0)
    img[escaped] = np.round(255.0 * level[escaped]).astype(np.uint8)[:, None]
    img[raster.classes == OrbitKind.CONVERGED] = palette.converged
    img[raster.classes == OrbitKind.OSCILLATING] = palette.oscillating
    img[raster.classes == OrbitKind.UNDECIDED] = palette.undecided
    return img


def _line(i0: int, j0: int, i1: int, j1: int):
    di, dj = abs(i1 - i0), -abs(j1 - j0)
    si = 1 if i0 < i1 else -1
    sj = 1 if j0 < j1 else -1
    err = di + dj
    while True:
        yield i0, j0
        if i0 == i1 and j0 == j1:
            return
        e2 = 2 * err
        if e2 >= dj:
            err += dj
            i0 += si
        if e2 <= di:
            err += di
            j0 += sj


def overlay_curves(image: np.ndarray, polylines, grid: GridSpec,
                   color=(255, 0, 0)) -> np.ndarray:
    """Draw polylines (sequences of complex c) with 1-pixel Bresenham segments.

    Returns a new image; pixels outside the grid are dropped and segments
    are clipped first, so far-away vertices cost nothing.
    """
    if image.shape[:2] != (grid.height, grid.width):
        raise ValueError("image does not match grid")
    out = image.copy()
    for line in polylines:
        pts = [_pixel_coords(grid, complex(c)) for c in line]
        if len(pts) == 1:
            pts = pts * 2
        for p0, p1 in zip(pts, pts[1:]):
            seg = _clip(p0, p1, grid.width, grid.height)
            if seg is None:
                continue
            (x0, y0), (x1, y1) = seg
            for i, j in _line(math.floor(x0), math.floor(y0), math.floor(x1), math.floor(y1)):
                if 0 <= i < grid.width and 0 <= j < grid.height:
                    out[j, i] = color
    return out


def _pixel_coords(grid: GridSpec, c: complex) -> tuple[float, float]:
    x = (c.real - grid.re_min) / (grid.re_max - grid.re_min) * grid.width
    y = (grid.im_max - c.imag) / (grid.im_max - grid.im_min) * grid.height
    return x, y


def _clip(p0, p1, width: int, height: int):
    """Liang-Barsky clip of a segment to the grid padded by one pixel."""
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, x0 + 1), (dx, width + 1 - x0), (-dy, y0 + 1), (dy, height + 1 - y0)):
        if p == 0:
            if q < 0:
                return None
            continue
        t = q / p
        if p < 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 > t1:
            return None
    if t0 == 0.0 and t1 == 1.0:
        return p0, p1
    return (x0 + t0 * dx, y0 + t0 * dy), (x0 + t1 * dx, y0 + t1 * dy)


def curve_pixels(polylines, grid: GridSpec) -> set[tuple[int, int]]:
    """Pixels (i, j) that overlay_curves would paint."""
    mask = np.zeros((grid.height, grid.width, 3), dtype=np.uint8)
    drawn = overlay_curves(mask, polylines, grid, (1, 1, 1))
    js, is_ = np.nonzero(drawn[:, :, 0])
    return set(zip(is_.tolist(), js.tolist()))


def count_classes(raster: ClassRaster, rect: tuple[int, int, int, int] | None = None
                  ) -> tuple[int, int, int, int]:
    """Pixel counts (escaped, converged, oscillating, undecided).

    ``rect`` is ``(i0, j0, i1, j1)`` in pixel coordinates, half-open.
    """
    if rect is None:
        rect = (0, 0, raster.width, raster.height)
    i0, j0, i1, j1 = rect
    if not (0 <= i0 <= i1 <= raster.width and 0 <= j0 <= j1 <= raster.height):
        raise ValueError("rectangle outside raster")
    block = raster.classes[j0:j1, i0:i1]
    counts = np.bincount(block.ravel(), minlength=4)
    return tuple(int(x) for x in counts[:4])
