import hashlib
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from src.core.basin import ESCAPED, POLE, UNDECIDED, code_name

logger = logging.getLogger(__name__)

# Attractor colours by index; reserved codes below.
ATTRACTOR_PALETTE = (
    (31, 119, 180),   # blue
    (255, 215, 0),    # yellow
    (44, 160, 44),    # green
    (148, 103, 189),  # purple
    (255, 127, 14),   # orange
    (23, 190, 207),   # cyan
    (227, 119, 194),  # pink
    (140, 86, 75),    # brown
    (188, 189, 34),   # olive
    (174, 199, 232),  # light blue
    (152, 223, 138),  # light green
    (255, 187, 120),  # light orange
    (197, 176, 213),  # lavender
    (219, 219, 141),  # khaki
    (158, 218, 229),  # pale cyan
    (247, 182, 210),  # rose
)
RESERVED_COLORS = {
    ESCAPED: (0, 0, 0),
    POLE: (214, 39, 40),
    UNDECIDED: (128, 128, 128),
}


def palette_lut(attractor_count):
    """(attractor_count + 3, 3) uint8 table indexed by code + 3."""
    if attractor_count > len(ATTRACTOR_PALETTE):
        raise ValueError(f"{attractor_count} attractors exceed the {len(ATTRACTOR_PALETTE)}-colour palette")
    lut = np.zeros((attractor_count + 3, 3), dtype=np.uint8)
    for code, color in RESERVED_COLORS.items():
        lut[code + 3] = color
    for index in range(attractor_count):
        lut[index + 3] = ATTRACTOR_PALETTE[index]
    return lut


def ppm_bytes(img):
    lut = palette_lut(len(img.attractors))
    header = f"P6\n{img.nx} {img.ny}\n255\n".encode("ascii")
    if img.cells.size == 0:
        return header
    payload = lut[img.cells.astype(np.int64) + 3]
    return header + np.ascontiguousarray(payload, dtype=np.uint8).tobytes()


def write_ppm(img, path):
    data = ppm_bytes(img)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.info(f"Wrote {path} ({img.nx}x{img.ny}, sha256 {hashlib.sha256(data).hexdigest()[:12]})")
    return path


def ppm_sha256(img):
    return hashlib.sha256(ppm_bytes(img)).hexdigest()


def stats_frame(img):
    rows = [
        {"code": code, "name": code_name(code), "fraction": fraction}
        for code, fraction in sorted(img.stats.items())
    ]
    return pd.DataFrame(rows, columns=["code", "name", "fraction"])


def write_stats_csv(img, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stats_frame(img)[["code", "fraction"]].to_csv(path, index=False, float_format="%.17g")
    return path
