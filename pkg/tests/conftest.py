import math

import numpy as np
import pytest

from stabeam import ArrayGeometry, PulseModel


@pytest.fixture
def geometry8():
    return ArrayGeometry(8, 0.3e-3, 5e6, 40e6, 1540.0)


@pytest.fixture
def pulse():
    return PulseModel(5e6)


def naive_lri(rf, emission_index, grid, weights=None):
    """Independent per-pixel reference beamformer.

    Recomputes t * fs directly (no coarse/fine split, no vectorized kernels)
    with the same 2-tap interpolation and out-of-window-is-zero rule.
    """
    geometry = rf.geometry
    event = rf.sequence.events[emission_index]
    c = geometry.sound_speed
    fs = geometry.sampling_frequency
    ex = geometry.element_x
    if weights is None:
        weights = np.ones(geometry.num_elements)
    xs = grid.x_coords
    zs = grid.z_coords
    out = np.zeros((grid.nz, grid.nx))
    data = rf.samples[emission_index]
    for iz, z in enumerate(zs):
        for ix, x in enumerate(xs):
            if len(event.active_elements) == 1:
                xm = ex[event.active_elements[0]]
                t_tx = math.hypot(x - xm, z) / c
            else:
                vx, vz = event.virtual_source
                t_tx = (math.hypot(x - vx, z - vz) - (-vz)) / c - event.delay_offset
            acc = 0.0
            for n in range(geometry.num_elements):
                pos = (t_tx + math.hypot(x - ex[n], z) / c) * fs
                k = math.floor(pos)
                f = pos - k
                if 0 <= k and k + 1 <= data.shape[1] - 1:
                    acc += weights[n] * (data[n, k] * (1.0 - f) + data[n, k + 1] * f)
            out[iz, ix] = acc
    return out


def envelope_peak(trace):
    """(index, value) of the analytic-envelope maximum of a 1-D trace."""
    from scipy.signal import hilbert

    env = np.abs(hilbert(trace))
    i = int(env.argmax())
    return i, float(env[i])
