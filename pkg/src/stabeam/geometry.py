"""Linear-array geometry and transmit-sequence generation for STA, MSTA and PA scanning."""

import math
from dataclasses import dataclass, field

import numpy as np

STA_SINGLE = "STA_SINGLE"
MSTA_SUBAPERTURE = "MSTA_SUBAPERTURE"
PA_FOCUSED = "PA_FOCUSED"

DEFAULT_VIRTUAL_SOURCE_ANGLE_DEG = 30.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear transducer array centered on x = 0, elements in the z = 0 plane."""

    num_elements: int
    pitch: float            # m, center-to-center
    center_frequency: float  # Hz
    sampling_frequency: float  # Hz
    sound_speed: float      # m/s

    def __post_init__(self):
        if self.num_elements < 1:
            raise ValueError("num_elements must be >= 1")
        if self.pitch <= 0:
            raise ValueError("pitch must be > 0")
        if self.center_frequency <= 0 or self.sampling_frequency <= 0:
            raise ValueError("frequencies must be > 0")
        if self.sound_speed <= 0:
            raise ValueError("sound_speed must be > 0")
        if self.sampling_frequency < 4.0 * self.center_frequency:
            raise ValueError("sampling_frequency must be >= 4x center_frequency")

    @property
    def element_x(self):
        n = self.num_elements
        return (np.arange(n) - (n - 1) / 2.0) * self.pitch


def element_positions(geometry):
    """(x, z) element centers, z identically 0. Shape (num_elements, 2)."""
    pos = np.zeros((geometry.num_elements, 2))
    pos[:, 0] = geometry.element_x
    return pos


@dataclass(frozen=True)
class TransmitEvent:
    """One firing: which elements are excited, when, and how strongly.

    ``virtual_source`` is set for multi-element defocused (MSTA) events and
    ``focus`` for fixed-focus (PA) events; both are (x, z) in meters.
    ``delay_offset`` is the common delay subtracted when normalizing the
    per-element delays so that min(delays) == 0.
    """

    active_elements: tuple
    delays: tuple            # seconds, min is 0
    apodization: tuple       # weights in [0, 1]
    label: str
    virtual_source: tuple | None = None
    focus: tuple | None = None
    delay_offset: float = 0.0

    def __post_init__(self):
        if len(self.active_elements) == 0:
            raise ValueError("event must fire at least one element")
        if len(set(self.active_elements)) != len(self.active_elements):
            raise ValueError("duplicate elements in event")
        if not (len(self.active_elements) == len(self.delays) == len(self.apodization)):
            raise ValueError("active_elements, delays and apodization lengths differ")
        if min(self.delays) != 0.0:
            raise ValueError("delays must be normalized so the earliest firing is 0")
        if any(d < 0 or not math.isfinite(d) for d in self.delays):
            raise ValueError("delays must be finite and nonnegative")
        if any(not 0.0 <= a <= 1.0 for a in self.apodization):
            raise ValueError("apodization weights must lie in [0, 1]")


@dataclass(frozen=True)
class TransmitSequence:
    events: tuple
    mode: str                # "STA" | "MSTA" | "PA"
    scanlines: tuple | None = None  # PA only: lateral line positions, meters

    def __post_init__(self):
        if self.mode not in ("STA", "MSTA", "PA"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "PA":
            if self.scanlines is None or len(self.scanlines) != len(self.events):
                raise ValueError("PA sequence needs one scanline per event")

    @property
    def num_emissions(self):
        return len(self.events)


def sta_sequence(geometry):
    """One single-element emission per array element, zero delay, unit weight."""
    events = tuple(
        TransmitEvent((k,), (0.0,), (1.0,), STA_SINGLE)
        for k in range(geometry.num_elements)
    )
    return TransmitSequence(events, "STA")


def default_virtual_source_depth(subaperture_size, pitch):
    # opening half-angle of ~30 degrees for the diverging wave
    return subaperture_size * pitch / math.tan(math.radians(DEFAULT_VIRTUAL_SOURCE_ANGLE_DEG))


def msta_event(geometry, start, size, virtual_source_depth):
    """Build one defocused subaperture event over elements [start, start+size)."""
    if not 1 <= size <= geometry.num_elements:
        raise ValueError("subaperture size out of range")
    if start < 0 or start + size > geometry.num_elements:
        raise ValueError("subaperture window out of range")
    if size == 1:
        # degenerates to a plain single-element firing
        return TransmitEvent((start,), (0.0,), (1.0,), STA_SINGLE)
    z_v = virtual_source_depth
    if z_v <= 0:
        raise ValueError("virtual_source_depth must be > 0")
    xs = geometry.element_x[start:start + size]
    x_c = float(xs.mean())
    c = geometry.sound_speed
    raw = (np.hypot(xs - x_c, z_v) - z_v) / c
    offset = float(raw.min())
    delays = raw - offset
    delays[np.argmin(raw)] = 0.0  # exact zero at the reference element
    return TransmitEvent(
        tuple(range(start, start + size)),
        tuple(float(d) for d in delays),
        (1.0,) * size,
        MSTA_SUBAPERTURE,
        virtual_source=(x_c, -z_v),
        delay_offset=offset,
    )


def msta_sequence(geometry, subaperture_size, stride, virtual_source_depth=None):
    """Contiguous subaperture windows stepped by ``stride``, each emulating a
    spherical wave diverging from a virtual source behind the subaperture center."""
    if not 1 <= subaperture_size <= geometry.num_elements:
        raise ValueError("subaperture_size must be in [1, num_elements]")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if virtual_source_depth is None:
        virtual_source_depth = default_virtual_source_depth(subaperture_size, geometry.pitch)
    starts = range(0, geometry.num_elements - subaperture_size + 1, stride)
    events = tuple(msta_event(geometry, s, subaperture_size, virtual_source_depth) for s in starts)
    if not events:
        raise ValueError("stride/subaperture combination produces zero events")
    return TransmitSequence(events, "MSTA")


def pa_event(geometry, focus_x, focus_depth):
    """Full-aperture firing focused at (focus_x, focus_depth); the farthest
    element fires first (delay 0) so all wavefronts meet at the focus."""
    if focus_depth <= 0:
        raise ValueError("focus_depth must be > 0")
    xs = geometry.element_x
    d = np.hypot(xs - focus_x, focus_depth)
    d_max = float(d.max())
    delays = (d_max - d) / geometry.sound_speed
    delays[np.argmax(d)] = 0.0
    n = geometry.num_elements
    return TransmitEvent(
        tuple(range(n)),
        tuple(float(t) for t in delays),
        (1.0,) * n,
        PA_FOCUSED,
        focus=(float(focus_x), float(focus_depth)),
    )


def pa_sequence(geometry, focus_depth, scanlines):
    """One focused emission per scan line; lines are lateral positions in meters."""
    if len(scanlines) == 0:
        raise ValueError("scanlines must be nonempty")
    events = tuple(pa_event(geometry, x, focus_depth) for x in scanlines)
    return TransmitSequence(events, "PA", scanlines=tuple(float(x) for x in scanlines))
