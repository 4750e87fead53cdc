"""Delay-and-sum receive beamforming: LRI formation, HRI synthesis, PA baseline."""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels

LRI = "LRI"
HRI = "HRI"
PA = "PA"
ENVELOPE = "ENVELOPE"
DB = "DB"


@dataclass(frozen=True)
class ImageGrid:
    """Cartesian pixel lattice; pixel centers span the extents inclusively."""

    x_min: float
    x_max: float
    z_min: float
    z_max: float
    nx: int
    nz: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be < x_max")
        if not 0 < self.z_min < self.z_max:
            raise ValueError("need 0 < z_min < z_max")
        if self.nx < 1 or self.nz < 1:
            raise ValueError("nx and nz must be >= 1")

    @property
    def x_coords(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def z_coords(self):
        return np.linspace(self.z_min, self.z_max, self.nz)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / max(self.nx - 1, 1)

    @property
    def dz(self):
        return (self.z_max - self.z_min) / max(self.nz - 1, 1)


@dataclass
class Image:
    grid: ImageGrid
    values: np.ndarray  # [z][x]
    kind: str

    def __post_init__(self):
        if self.values.shape != (self.grid.nz, self.grid.nx):
            raise ValueError("image shape does not match grid")


class DelaySplit(NamedTuple):
    coarse: int
    fine: float


def round_trip_delay(tx, rx, point, c):
    """Transmit-to-point-to-receive time of flight; symmetric in tx and rx."""
    if c <= 0:
        raise ValueError("sound speed must be > 0")
    return (math.dist(point, tx) + math.dist(point, rx)) / c


def split_delay(t, fs):
    """Split a delay into an integer sample index and a fractional remainder."""
    if t < 0:
        raise ValueError("delay must be nonnegative")
    pos = t * fs
    coarse = int(math.floor(pos))
    return DelaySplit(coarse, pos - coarse)


def read_interpolated(trace, position):
    """2-tap linear read at a fractional sample index; out-of-window reads are 0."""
    c0 = int(math.floor(position))
    f = position - c0
    if c0 >= 0 and c0 + 1 <= len(trace) - 1:
        return trace[c0] * (1.0 - f) + trace[c0 + 1] * f
    return 0.0


def receive_weights(num_elements, apodization):
    if apodization == "rect":
        return np.ones(num_elements)
    if apodization == "hann":
        return np.hanning(num_elements)
    raise ValueError(f"unknown apodization {apodization!r}")


def transmit_arrival_times(event, geometry, xs, zs):
    """Transmit wavefront arrival time at each pixel of the (zs, xs) lattice.

    Single-element events use the exact element-to-pixel time.  Multi-element
    defocused events use the virtual-source model: the wave appears to diverge
    from the source behind the array, offset so that time 0 is the event's
    normalized (earliest) firing.
    """
    X = xs[None, :]
    Z = zs[:, None]
    c = geometry.sound_speed
    if len(event.active_elements) == 1:
        xm = geometry.element_x[event.active_elements[0]]
        return np.hypot(X - xm, Z) / c
    if event.virtual_source is None:
        raise ValueError("multi-element event lacks a virtual source")
    vx, vz = event.virtual_source
    z_v = -vz
    return (np.hypot(X - vx, Z - vz) - z_v) / c - event.delay_offset


def beamform_lri(rf, emission_index, grid, rx_apodization="rect"):
    """Dynamically focused low-resolution image from one emission."""
    if rf.sequence.mode == "PA":
        raise ValueError("LRI undefined for PA mode")
    if not 0 <= emission_index < rf.sequence.num_emissions:
        raise ValueError(f"emission index {emission_index} out of range")
    event = rf.sequence.events[emission_index]
    geometry = rf.geometry
    xs = grid.x_coords
    zs = grid.z_coords
    t_tx = transmit_arrival_times(event, geometry, xs, zs)
    w = receive_weights(geometry.num_elements, rx_apodization)
    values = kernels.das_grid(
        np.ascontiguousarray(rf.samples[emission_index]),
        geometry.element_x, w, t_tx, xs, zs,
        geometry.sampling_frequency, geometry.sound_speed,
    )
    return Image(grid, values, LRI)


def synthesize_hri(lris):
    """Coherent (pixel-wise) sum of low-resolution images on one grid."""
    if not lris:
        raise ValueError("need at least one LRI")
    grid = lris[0].grid
    if any(im.grid != grid for im in lris):
        raise ValueError("LRI grids differ")
    total = np.zeros_like(lris[0].values)
    for im in lris:
        total += im.values
    return Image(grid, total, HRI)


def pa_transmit_times(event, geometry, zs):
    """Fixed-focus transmit timing along the event's scan line.

    Uses the simultaneous-arrival constant T0 = max element-to-focus distance
    over c, then the on-line approximation t(z) = T0 + (z - z_focus) / c.
    """
    if event.focus is None:
        raise ValueError("PA event lacks a focus")
    fx, fz = event.focus
    d = np.hypot(geometry.element_x - fx, fz)
    t0 = float(d.max()) / geometry.sound_speed
    return t0 + (zs - fz) / geometry.sound_speed


def beamform_pa(rf, grid, rx_apodization="rect"):
    """Line-by-line PA image; grid columns take the nearest scan line's data."""
    if rf.sequence.mode != "PA":
        raise ValueError("beamform_pa requires a PA dataset")
    geometry = rf.geometry
    zs = grid.z_coords
    lines = np.asarray(rf.sequence.scanlines)
    w = receive_weights(geometry.num_elements, rx_apodization)
    profiles = np.empty((grid.nz, lines.shape[0]))
    for li, (x_l, event) in enumerate(zip(lines, rf.sequence.events)):
        t_tx = pa_transmit_times(event, geometry, zs)[:, None]
        col = kernels.das_grid(
            np.ascontiguousarray(rf.samples[li]),
            geometry.element_x, w, t_tx, np.array([x_l]), zs,
            geometry.sampling_frequency, geometry.sound_speed,
        )
        profiles[:, li] = col[:, 0]
    nearest = np.abs(grid.x_coords[:, None] - lines[None, :]).argmin(axis=1)
    return Image(grid, np.ascontiguousarray(profiles[:, nearest]), PA)
