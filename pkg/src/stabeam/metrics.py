"""Image-quality and data-transfer metrics: SNR, lateral FWHM, side-lobe level,
bytes-per-frame accounting, and the multi-method comparison report."""

import math
from dataclasses import dataclass

import numpy as np

from .beamform import ENVELOPE

SIGNAL = "SIGNAL"
NOISE = "NOISE"


@dataclass(frozen=True)
class RegionSpec:
    x_range: tuple  # (lo, hi) meters
    z_range: tuple
    role: str

    def __post_init__(self):
        if self.role not in (SIGNAL, NOISE):
            raise ValueError(f"unknown region role {self.role!r}")
        if self.x_range[0] >= self.x_range[1] or self.z_range[0] >= self.z_range[1]:
            raise ValueError("region ranges must be (lo, hi) with lo < hi")


@dataclass(frozen=True)
class TransferModel:
    emissions: int
    channels: int
    samples_per_emission: int
    bytes_per_sample: int

    def __post_init__(self):
        if min(self.emissions, self.channels,
               self.samples_per_emission, self.bytes_per_sample) < 1:
            raise ValueError("all transfer-model factors must be positive")


def region_mask(grid, region):
    xs = grid.x_coords
    zs = grid.z_coords
    mx = (xs >= region.x_range[0]) & (xs <= region.x_range[1])
    mz = (zs >= region.z_range[0]) & (zs <= region.z_range[1])
    mask = mz[:, None] & mx[None, :]
    if not mask.any():
        raise ValueError("region does not intersect the image grid")
    return mask


def metric_snr(image, signal, noise):
    """20*log10(rms(signal region) / std(noise region)); +inf when the noise
    region has exactly zero spread."""
    if image.kind != ENVELOPE:
        raise ValueError("metric_snr expects an envelope image")
    if signal.role != SIGNAL or noise.role != NOISE:
        raise ValueError("regions must be a SIGNAL and a NOISE spec")
    ms = region_mask(image.grid, signal)
    mn = region_mask(image.grid, noise)
    if (ms & mn).any():
        raise ValueError("signal and noise regions overlap")
    rms = math.sqrt(float(np.mean(image.values[ms] ** 2)))
    nstd = float(np.std(image.values[mn]))
    if nstd == 0.0:
        return math.inf
    return 20.0 * math.log10(rms / nstd)


def _climb_to_peak(values, iz, ix):
    nz, nx = values.shape
    while True:
        z0, z1 = max(iz - 1, 0), min(iz + 2, nz)
        x0, x1 = max(ix - 1, 0), min(ix + 2, nx)
        patch = values[z0:z1, x0:x1]
        dz, dx = np.unravel_index(int(patch.argmax()), patch.shape)
        nz_i, nx_i = z0 + dz, x0 + dx
        if (nz_i, nx_i) == (iz, ix):
            return iz, ix
        iz, ix = nz_i, nx_i


def find_peak(image, hint):
    """Pixel indices (iz, ix) of the local maximum reached by hill-climbing
    from the pixel nearest the (x, z) hint."""
    ix = int(np.abs(image.grid.x_coords - hint[0]).argmin())
    iz = int(np.abs(image.grid.z_coords - hint[1]).argmin())
    return _climb_to_peak(image.values, iz, ix)


def _half_crossing(profile, xs, i_peak, half, step):
    i = i_peak
    while 0 <= i + step < len(profile):
        j = i + step
        if profile[j] < half:
            # linear interpolation between samples i and j
            frac = (profile[i] - half) / (profile[i] - profile[j])
            return xs[i] + frac * (xs[j] - xs[i])
        i = j
    return None


def metric_fwhm(image, peak_hint):
    """-6 dB (half-amplitude) width of the lateral profile through the peak.

    Returns the width in meters, or None when the profile never drops below
    half maximum inside the grid (unresolved target).
    """
    if image.kind != ENVELOPE:
        raise ValueError("metric_fwhm expects an envelope image")
    iz, ix = find_peak(image, peak_hint)
    profile = image.values[iz]
    xs = image.grid.x_coords
    peak = profile[ix]
    if peak <= 0:
        return None
    half = peak / 2.0
    left = _half_crossing(profile, xs, ix, half, -1)
    right = _half_crossing(profile, xs, ix, half, +1)
    if left is None or right is None:
        return None
    return right - left


def metric_sidelobe(image, peak_hint):
    """Highest secondary maximum of the lateral profile, in dB re the main
    peak; the main lobe is delimited by the first local minima flanking the
    peak.  Returns None when no secondary maximum exists."""
    if image.kind != ENVELOPE:
        raise ValueError("metric_sidelobe expects an envelope image")
    iz, ix = find_peak(image, peak_hint)
    profile = image.values[iz]
    peak = profile[ix]
    if peak <= 0:
        return None
    best = None
    for step in (-1, +1):
        i = ix
        # walk down the main lobe to the first local minimum
        while 0 <= i + step < len(profile) and profile[i + step] <= profile[i]:
            i += step
        if not 0 <= i + step < len(profile):
            continue  # monotone out to the edge on this side
        rest = profile[:i] if step < 0 else profile[i + 1:]
        if rest.size:
            side = float(rest.max())
            best = side if best is None else max(best, side)
    if best is None or best <= 0:
        return None
    return 20.0 * math.log10(best / peak)


def data_transfer_bytes(model):
    """Exact bytes moved per frame: emissions x channels x samples x bytes."""
    return (model.emissions * model.channels
            * model.samples_per_emission * model.bytes_per_sample)


@dataclass(frozen=True)
class MethodRun:
    """One beamforming method's envelope image plus its measurement setup."""

    method: str
    image: object  # envelope-kind Image
    signal: RegionSpec
    noise: RegionSpec
    peak_hint: tuple
    transfer: TransferModel


@dataclass(frozen=True)
class ReportRow:
    method: str
    snr_db: float
    fwhm_m: float | None
    sidelobe_db: float | None
    bytes_per_frame: int


def snr_gain_report(runs):
    """One metrics row per method, ordered by method name.

    All runs must share one image grid (same phantom/geometry discipline is
    the caller's responsibility, but mismatched grids are rejected here).
    """
    if not runs:
        raise ValueError("no runs to report")
    grid = runs[0].image.grid
    if any(r.image.grid != grid for r in runs):
        raise ValueError("method runs use different image grids")
    rows = []
    for r in sorted(runs, key=lambda r: r.method):
        rows.append(ReportRow(
            method=r.method,
            snr_db=metric_snr(r.image, r.signal, r.noise),
            fwhm_m=metric_fwhm(r.image, r.peak_hint),
            sidelobe_db=metric_sidelobe(r.image, r.peak_hint),
            bytes_per_frame=data_transfer_bytes(r.transfer),
        ))
    return rows
