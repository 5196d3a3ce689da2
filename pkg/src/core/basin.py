"""
Basin-of-attraction rendering and the pixel-level Julia connectivity probe.

Cell codes: an attractor index (>= 0), or ESCAPED / POLE / UNDECIDED.
Row 0 of every grid is the top of the window (largest imaginary part).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import ndimage

from src.core.analysis import FixedPointRecord, analyze_fixed_point, classify_multiplier, cycle_multiplier
from src.core.config import RenderConfig
from src.core.errors import NumericError, UsageError
from src.core.evaluate import Finite, evaluate
from src.core.expr import differentiate
from src.core.orbit import (
    FATE_CONVERGED, FATE_ESCAPED, FATE_POLE, OrbitBatch, chordal_distance_array, iterate_orbits,
)
from src.utils.workers import resolve_workers, split_rows

logger = logging.getLogger(__name__)

ESCAPED = -1
POLE = -2
UNDECIDED = -3
CODE_NAMES = {ESCAPED: "ESCAPED", POLE: "POLE", UNDECIDED: "UNDECIDED"}
MAX_SIDE = 8192
PHASE_STRIDE = 64


def code_name(code):
    return CODE_NAMES.get(code, f"attractor_{code}")


@dataclass(frozen=True)
class Window:
    cx: float
    cy: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise UsageError(f"Window must have positive size, got {self.width}x{self.height}")
        if not all(math.isfinite(v) for v in (self.cx, self.cy, self.width, self.height)):
            raise UsageError("Window coordinates must be finite")

    @classmethod
    def parse(cls, text):
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise UsageError(f"Window needs cx,cy,w,h, got {text!r}")
        return cls(*parts)

    def pixel_size(self, nx, ny):
        return self.width / max(nx, 1), self.height / max(ny, 1)

    def pixel_centers(self, nx, ny):
        dx, dy = self.pixel_size(nx, ny)
        xs = self.cx - self.width / 2 + (np.arange(nx) + 0.5) * dx
        ys = self.cy + self.height / 2 - (np.arange(ny) + 0.5) * dy
        return xs[None, :] + 1j * ys[:, None]

    def pixel_of(self, z, nx, ny):
        """(row, col) of the pixel holding z, or None outside the window."""
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return None
        dx, dy = self.pixel_size(nx, ny)
        col = math.floor((z.real - (self.cx - self.width / 2)) / dx)
        row = math.floor(((self.cy + self.height / 2) - z.imag) / dy)
        if 0 <= row < ny and 0 <= col < nx:
            return row, col
        return None

    def to_list(self):
        return [self.cx, self.cy, self.width, self.height]

    def __str__(self):
        return ",".join(repr(v) for v in self.to_list())


@dataclass
class BasinImage:
    window: Window
    resolution: Tuple[int, int]
    cells: np.ndarray
    phases: np.ndarray
    attractors: List[FixedPointRecord]
    stats: Dict[int, float]

    @property
    def nx(self):
        return self.resolution[0]

    @property
    def ny(self):
        return self.resolution[1]

    def fate_labels(self):
        """Codes refined by cycle phase, so each component of a periodic basin gets its own label."""
        return self.cells.astype(np.int64) * PHASE_STRIDE + self.phases

    def summary(self):
        return {
            "window": self.window.to_list(),
            "resolution": list(self.resolution),
            "stats": {str(code): fraction for code, fraction in sorted(self.stats.items())},
            "attractors": [rec.to_dict() for rec in self.attractors],
        }


def compute_stats(cells):
    total = cells.size
    if total == 0:
        return {}
    codes, counts = np.unique(cells, return_counts=True)
    return {int(code): int(count) / total for code, count in zip(codes, counts)}


def _cycle_points(record):
    return record.cycle or (record.location,)


def _match(final, record, match_eps):
    """Mask of points within match_eps of the record's cycle, and the nearest cycle index."""
    points = _cycle_points(record)
    distances = np.stack([chordal_distance_array(final, np.complex128(c)) for c in points])
    nearest = np.argmin(distances, axis=0)
    return distances.min(axis=0) < match_eps, nearest


def _attractor_from_pixel(e, batch, i, pixel):
    period = int(batch.period[i])
    seed = complex(batch.final[i])
    try:
        return analyze_fixed_point(e, seed, period, provenance=f"render pixel {pixel}")
    except NumericError as exc:
        logger.warning(f"Could not refine attractor at pixel {pixel}: {exc}")
    cycle = tuple(complex(z) for z in batch.cycles[i, :period])
    m = cycle_multiplier(differentiate(e), cycle)
    kind, q = classify_multiplier(m)
    return FixedPointRecord(cycle[0], period, m, kind, f"render pixel {pixel} (unrefined)", q, cycle)


def _run_bands(e, seeds, nx, ny, cfg, progress_callback):
    total = seeds.size
    merged = OrbitBatch(
        fate=np.empty(total, dtype=np.int8),
        index=np.empty(total, dtype=np.int64),
        period=np.empty(total, dtype=np.int64),
        iterations=np.empty(total, dtype=np.int64),
        final=np.empty(total, dtype=np.complex128),
        cycles=np.empty((total, cfg.orbit.period_max), dtype=np.complex128),
    )
    workers = resolve_workers(cfg.workers)
    bands = split_rows(ny, workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_band = {
            executor.submit(iterate_orbits, e, seeds[a * nx:b * nx], cfg.orbit): (a, b)
            for a, b in bands
        }
        done = 0
        for future in as_completed(future_to_band):
            a, b = future_to_band[future]
            batch = future.result()
            rows = slice(a * nx, b * nx)
            merged.fate[rows] = batch.fate
            merged.index[rows] = batch.index
            merged.period[rows] = batch.period
            merged.iterations[rows] = batch.iterations
            merged.final[rows] = batch.final
            merged.cycles[rows] = batch.cycles
            done += 1
            if progress_callback:
                progress_callback(100 * done / len(bands), f"Rows {a}-{b - 1} of {ny} done")
    return merged


def render(e, window, resolution, attractors=(), cfg=RenderConfig(), progress_callback=None):
    nx, ny = (int(v) for v in resolution)
    if not (0 <= nx <= MAX_SIDE and 0 <= ny <= MAX_SIDE):
        raise UsageError(f"Resolution {nx}x{ny} outside 0..{MAX_SIDE}")
    seeds = window.pixel_centers(nx, ny).ravel()
    total = seeds.size
    logger.info(f"Rendering {nx}x{ny} over window {window}")

    batch = _run_bands(e, seeds, nx, ny, cfg, progress_callback) if total else None
    cells = np.full(total, UNDECIDED, dtype=np.int32)
    phases = np.zeros(total, dtype=np.int8)
    attractors = list(attractors)
    if batch is None:
        return BasinImage(window, (nx, ny), cells.reshape(ny, nx), phases.reshape(ny, nx),
                          attractors, {})

    cells[batch.fate == FATE_ESCAPED] = ESCAPED
    cells[batch.fate == FATE_POLE] = POLE

    # Single-threaded from here on: attractor discovery follows scan order.
    pending = np.flatnonzero(batch.fate == FATE_CONVERGED)

    def assign(code, record, candidates, force_first=False):
        matched, nearest = _match(batch.final[candidates], record, cfg.match_eps)
        if force_first:
            matched[0] = True
        hit = candidates[matched]
        cells[hit] = code
        p = len(_cycle_points(record))
        phases[hit] = (nearest[matched] - batch.index[hit]) % p
        return candidates[~matched]

    for code, record in enumerate(attractors):
        if pending.size == 0:
            break
        pending = assign(code, record, pending)

    while pending.size:
        first = int(pending[0])
        pixel = divmod(first, nx)
        record = _attractor_from_pixel(e, batch, first, pixel)
        attractors.append(record)
        logger.info(f"New attractor #{len(attractors) - 1} ({record.kind.value}, period "
                    f"{record.period}) discovered at pixel {pixel}")
        pending = assign(len(attractors) - 1, record, pending, force_first=True)

    cells = cells.reshape(ny, nx)
    return BasinImage(window, (nx, ny), cells, phases.reshape(ny, nx), attractors,
                      compute_stats(cells))


# Connectivity probe ---------------------------------------------------------

@dataclass(frozen=True)
class ConnectivityRung:
    resolution: int
    pixel_size: float
    julia_pixels: int
    components: int
    largest_diameter: float

    def to_dict(self):
        return {
            "resolution": self.resolution,
            "pixel_size": self.pixel_size,
            "julia_pixels": self.julia_pixels,
            "components": self.components,
            "largest_diameter": self.largest_diameter,
        }


class DiameterTrend(str, Enum):
    SHRINKING = "Shrinking"
    STABILIZING = "Stabilizing"
    MIXED = "Mixed"
    UNRESOLVED = "Unresolved"


@dataclass
class ConnectivityReport:
    window: Window
    rungs: List[ConnectivityRung] = field(default_factory=list)

    @property
    def resolved(self):
        """True when every rung found at least one Julia pixel."""
        return bool(self.rungs) and all(rung.julia_pixels > 0 for rung in self.rungs)

    def diameter_ratios(self):
        """Successive largest-diameter ratios; None after a rung with no Julia pixels."""
        ratios = []
        for prev, cur in zip(self.rungs, self.rungs[1:]):
            if prev.largest_diameter == 0:
                ratios.append(None)
            else:
                ratios.append(cur.largest_diameter / prev.largest_diameter)
        return ratios

    def trend(self, threshold=0.8):
        ratios = self.diameter_ratios()
        if not self.resolved or any(r is None for r in ratios):
            return DiameterTrend.UNRESOLVED
        if all(r < threshold for r in ratios):
            return DiameterTrend.SHRINKING
        if all(r > threshold for r in ratios):
            return DiameterTrend.STABILIZING
        return DiameterTrend.MIXED

    def shrinking(self, threshold=0.8):
        return self.trend(threshold) is DiameterTrend.SHRINKING

    def stabilizing(self, threshold=0.8):
        return self.trend(threshold) is DiameterTrend.STABILIZING

    def to_dict(self):
        return {
            "window": self.window.to_list(),
            "rungs": [rung.to_dict() for rung in self.rungs],
            "diameter_ratios": self.diameter_ratios(),
            "resolved": self.resolved,
            "trend": self.trend().value,
        }


def julia_mask(image):
    """Pixels with a 4-neighbour carrying a different (code, phase) label."""
    labels = image.fate_labels()
    mask = np.zeros(labels.shape, dtype=bool)
    horizontal = labels[:, 1:] != labels[:, :-1]
    vertical = labels[1:, :] != labels[:-1, :]
    mask[:, 1:] |= horizontal
    mask[:, :-1] |= horizontal
    mask[1:, :] |= vertical
    mask[:-1, :] |= vertical
    return mask


def measure_components(mask, pixel_w, pixel_h):
    labeled, count = ndimage.label(mask)
    largest = 0.0
    for rows, cols in ndimage.find_objects(labeled):
        height = (rows.stop - rows.start) * pixel_h
        width = (cols.stop - cols.start) * pixel_w
        largest = max(largest, math.hypot(width, height))
    return count, largest


def connectivity_probe(e, window, resolutions, cfg=RenderConfig(), attractors=(),
                       progress_callback=None):
    resolutions = [int(r) for r in resolutions]
    if len(resolutions) < 2:
        raise UsageError("connectivity_probe needs at least two resolutions")
    if any(b <= a for a, b in zip(resolutions, resolutions[1:])):
        raise UsageError(f"Resolutions must increase: {resolutions}")

    report = ConnectivityReport(window)
    known = list(attractors)
    for step, n in enumerate(resolutions):
        image = render(e, window, (n, n), known, cfg)
        known = image.attractors
        pixel_w, pixel_h = window.pixel_size(n, n)
        mask = julia_mask(image)
        count, diameter = measure_components(mask, pixel_w, pixel_h)
        rung = ConnectivityRung(n, max(pixel_w, pixel_h), int(mask.sum()), int(count), diameter)
        report.rungs.append(rung)
        logger.info(f"Probe {n}x{n}: {rung.julia_pixels} Julia pixels, {count} components, "
                    f"largest diameter {diameter:.4g}")
        if progress_callback:
            progress_callback(100 * (step + 1) / len(resolutions), f"Probe rung {n}x{n} done")
    return report


# Pixel components of the Fatou set ----------------------------------------

def fatou_components(image):
    """
    4-connected components of equal (code, phase) label over attractor pixels.
    Returns (component id per pixel, 0 off the Fatou pixels; component count).
    """
    labels = image.fate_labels()
    components = np.zeros(labels.shape, dtype=np.int64)
    count = 0
    for value in np.unique(labels[image.cells >= 0]):
        labeled, n = ndimage.label(labels == value)
        components[labeled > 0] = labeled[labeled > 0] + count
        count += n
    return components, count


def count_holes(mask):
    """Bounded complementary regions of a pixel set."""
    filled = ndimage.binary_fill_holes(mask)
    _, holes = ndimage.label(filled & ~mask)
    return int(holes)


@dataclass(frozen=True)
class ComponentRecord:
    component: int
    code: int
    pixels: int
    holes: int
    lands_at: Optional[int]

    @property
    def lands(self):
        return self.lands_at is not None

    def to_dict(self):
        return {
            "component": self.component,
            "code": self.code,
            "pixels": self.pixels,
            "holes": self.holes,
            "lands_at": self.lands_at,
        }


def _representative(members):
    rows, cols = members
    k = int(np.argmin((rows - rows.mean()) ** 2 + (cols - cols.mean()) ** 2))
    return int(rows[k]), int(cols[k])


def landing_table(e, bov, image, k_max=32, min_pixels=16):
    """
    The component holding the bov and, for every component of at least
    `min_pixels`, the first k <= k_max at which f^k of its most central
    pixel lands in the bov's component.
    """
    components, _ = fatou_components(image)
    nx, ny = image.nx, image.ny
    where = image.window.pixel_of(complex(bov), nx, ny)
    home = int(components[where]) if where is not None else 0
    if home == 0:
        return None, []

    centers = image.window.pixel_centers(nx, ny)
    sizes = np.bincount(components.ravel())
    records = []
    for comp in np.flatnonzero(sizes >= min_pixels):
        if comp == 0:
            continue
        members = np.nonzero(components == comp)
        row, col = _representative(members)
        z = complex(centers[row, col])
        lands_at = None
        for k in range(1, k_max + 1):
            outcome = evaluate(e, z)
            if not isinstance(outcome, Finite):
                break
            z = outcome.value
            pixel = image.window.pixel_of(z, nx, ny)
            if pixel is not None and components[pixel] == home:
                lands_at = k
                break
        records.append(ComponentRecord(int(comp), int(image.cells[row, col]), int(sizes[comp]),
                                       count_holes(components == comp), lands_at))
    return home, records
