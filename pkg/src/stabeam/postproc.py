"""B-mode display chain: envelope detection and log compression."""

import numpy as np
from scipy.signal import hilbert

from .beamform import DB, ENVELOPE, HRI, LRI, PA, Image

DEFAULT_DYNAMIC_RANGE = 60.0


def envelope(image):
    """Analytic-signal magnitude along the depth axis of each image column."""
    if image.kind not in (LRI, HRI, PA):
        raise ValueError(f"cannot take envelope of a {image.kind} image")
    if image.grid.nz < 4:
        raise ValueError("need at least 4 depth samples for envelope detection")
    env = np.abs(hilbert(image.values, axis=0))
    return Image(image.grid, env, ENVELOPE)


def log_compress(env, dynamic_range=DEFAULT_DYNAMIC_RANGE):
    """Map an envelope image to dB relative to its maximum, floored at -dynamic_range."""
    if env.kind != ENVELOPE:
        raise ValueError("log_compress expects an envelope image")
    if dynamic_range <= 0:
        raise ValueError("dynamic_range must be > 0")
    v = env.values
    if np.any(v < 0):
        raise ValueError("envelope values must be nonnegative")
    peak = v.max() if v.size else 0.0
    out = np.full(v.shape, -dynamic_range)
    if peak > 0:
        pos = v > 0
        out[pos] = np.maximum(20.0 * np.log10(v[pos] / peak), -dynamic_range)
    return Image(env.grid, out, DB)


def to_pgm_bytes(db_image, dynamic_range=DEFAULT_DYNAMIC_RANGE):
    """8-bit binary PGM; dB value v maps to round(255 * (v + DR) / DR)."""
    if db_image.kind != DB:
        raise ValueError("PGM export expects a dB image")
    v = db_image.values
    pix = np.rint(255.0 * (v + dynamic_range) / dynamic_range)
    pix = np.clip(pix, 0, 255).astype(np.uint8)
    header = f"P5\n{db_image.grid.nx} {db_image.grid.nz}\n255\n".encode("ascii")
    return header + pix.tobytes()
