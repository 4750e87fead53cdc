"""Synthetic point-scatterer forward model producing per-emission RF channel data.

Born-approximation point scatterers, omnidirectional elements, spherical
1/(r_tx * r_rx) round-trip spreading, no attenuation.  Echoes are placed with
fractional-sample accuracy using the transpose of the beamformer's 2-tap
interpolation, so simulator and beamformer share one delay convention.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import ArrayGeometry, TransmitSequence

_FWHM = 2.0 * math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class PulseModel:
    """Gaussian-enveloped cosine burst. ``fractional_bandwidth`` is the -6 dB
    FWHM bandwidth of the envelope spectrum relative to the center frequency."""

    center_frequency: float
    fractional_bandwidth: float = 0.6
    duration: float | None = None  # seconds; default truncates at +-3 sigma

    def __post_init__(self):
        if not 0.0 < self.fractional_bandwidth < 2.0:
            raise ValueError("fractional_bandwidth must be in (0, 2)")
        if self.duration is not None and self.duration <= 0:
            raise ValueError("duration must be > 0")

    @property
    def sigma(self):
        return _FWHM / (2.0 * math.pi * self.fractional_bandwidth * self.center_frequency)

    @property
    def half_duration(self):
        if self.duration is not None:
            return self.duration / 2.0
        return 3.0 * self.sigma


def sample_pulse(pulse, t):
    """Pulse amplitude at time t (seconds, relative to the pulse center)."""
    t = np.asarray(t, dtype=float)
    s = pulse.sigma
    g = np.exp(-(t * t) / (2.0 * s * s)) * np.cos(2.0 * math.pi * pulse.center_frequency * t)
    out = np.where(np.abs(t) <= pulse.half_duration, g, 0.0)
    return out if out.ndim else float(out)


def pulse_table(pulse, fs):
    """Pulse sampled on the integer sample grid. Returns (table, jmin)."""
    jmax = int(math.ceil(pulse.half_duration * fs))
    jmin = -jmax
    j = np.arange(jmin, jmax + 1)
    return sample_pulse(pulse, j / fs), jmin


@dataclass(frozen=True)
class Phantom:
    """Point scatterers as an (n, 3) array of columns (x, z, reflectivity)."""

    scatterers: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scatterers, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "scatterers", s)
        if not np.all(np.isfinite(s)):
            raise ValueError("scatterer entries must be finite")
        if s.shape[0] and np.any(s[:, 1] <= 0):
            raise ValueError("scatterers must lie in front of the array (z > 0)")

    @property
    def num_scatterers(self):
        return self.scatterers.shape[0]


@dataclass
class RfDataSet:
    """Received echo data, shape [emission][channel][sample]."""

    samples: np.ndarray
    geometry: ArrayGeometry
    sequence: TransmitSequence
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        e, ch, _ = self.samples.shape
        if e != self.sequence.num_emissions:
            raise ValueError("emission axis does not match the transmit sequence")
        if ch != self.geometry.num_elements:
            raise ValueError("channel axis does not match the array")

    @property
    def num_samples(self):
        return self.samples.shape[2]


def required_samples(phantom, geometry, sequence, pulse):
    """Smallest time-axis length containing every echo, including pulse tails."""
    _, jmin = pulse_table(pulse, geometry.sampling_frequency)
    jmax = -jmin
    if phantom.num_scatterers == 0:
        return 1
    ex = geometry.element_x
    sx = phantom.scatterers[:, 0]
    sz = phantom.scatterers[:, 1]
    r = np.hypot(sx[:, None] - ex[None, :], sz[:, None])  # (nscat, nelem)
    c = geometry.sound_speed
    t_max = 0.0
    for ev in sequence.events:
        for mi, m in enumerate(ev.active_elements):
            t = ev.delays[mi] + (r[:, m] + r.max(axis=1)) / c
            t_max = max(t_max, float(t.max()))
    return int(math.floor(t_max * geometry.sampling_frequency)) + jmax + 2


def simulate_rf(phantom, geometry, sequence, pulse, num_samples,
                noise_std=0.0, seed=0):
    """Run the forward model for every emission of ``sequence``.

    Noise is i.i.d. white Gaussian per sample, drawn from a per-emission
    stream seeded with ``seed XOR emission_index`` so results do not depend
    on evaluation order.
    """
    need = required_samples(phantom, geometry, sequence, pulse)
    if num_samples < need:
        raise ValueError(
            f"num_samples={num_samples} cannot hold the deepest echo; "
            f"need at least {need} samples"
        )
    fs = geometry.sampling_frequency
    table, jmin = pulse_table(pulse, fs)
    ex = geometry.element_x
    sx = np.ascontiguousarray(phantom.scatterers[:, 0])
    sz = np.ascontiguousarray(phantom.scatterers[:, 1])
    refl = np.ascontiguousarray(phantom.scatterers[:, 2])
    nch = geometry.num_elements
    data = np.zeros((sequence.num_emissions, nch, num_samples))
    for e, ev in enumerate(sequence.events):
        if phantom.num_scatterers:
            kernels.deposit(
                data[e], sx, sz, refl,
                np.asarray(ev.active_elements, dtype=np.int64),
                np.asarray(ev.delays, dtype=float),
                np.asarray(ev.apodization, dtype=float),
                ex, table, jmin, fs, geometry.sound_speed,
            )
        if noise_std > 0.0:
            rng = np.random.default_rng(seed ^ e)
            data[e] += rng.normal(0.0, noise_std, size=(nch, num_samples))
    return RfDataSet(data, geometry, sequence, noise_std=noise_std, seed=seed)
