"""Hot numeric kernels: delay-and-sum gather and echo-pulse deposition.

Both kernels exist twice: a numba ``@njit`` version and a pure-numpy fallback.
The two paths perform the same floating-point operations in the same order, so
their outputs are bit-identical; the acceptance suite relies on that.

Backend selection: set ``STABEAM_BACKEND=numpy`` or ``STABEAM_BACKEND=numba``;
unset, numba is used when importable.
"""

import os

import numpy as np


def _pick_backend():
    choice = os.environ.get("STABEAM_BACKEND", "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        import numba  # noqa: F401  -- fail loudly if explicitly requested
        return "numba"
    if choice:
        raise ValueError(f"STABEAM_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


BACKEND = _pick_backend()


def active_backend():
    return BACKEND


# ---------------------------------------------------------------------------
# delay-and-sum gather
#
# For each pixel (iz, ix): sum over receive channels n of
#   w[n] * interp(rf[n], fs * (t_tx[iz, ix] + |pixel - elem[n]| / c))
# with 2-tap linear interpolation; reads whose second tap falls outside the
# trace contribute zero.
# ---------------------------------------------------------------------------

def das_grid_numpy(rf, elem_x, weights, t_tx, xs, zs, fs, c):
    nch, ns = rf.shape
    nz = zs.shape[0]
    nx = xs.shape[0]
    X = np.broadcast_to(xs[None, :], (nz, nx))
    Z = np.broadcast_to(zs[:, None], (nz, nx))
    out = np.zeros((nz, nx))
    for n in range(nch):
        dx = X - elem_x[n]
        t = t_tx + np.sqrt(dx * dx + Z * Z) / c
        pos = t * fs
        c0 = np.floor(pos).astype(np.int64)
        f = pos - c0
        valid = (c0 >= 0) & (c0 + 1 <= ns - 1)
        cs = np.clip(c0, 0, ns - 2)
        tr = rf[n]
        val = np.where(valid, tr[cs] * (1.0 - f) + tr[cs + 1] * f, 0.0)
        out += weights[n] * val
    return out


# ---------------------------------------------------------------------------
# echo deposition
#
# Adds, for every (scatterer, active transmit element, receive channel)
# triple, a tabulated pulse at the round-trip arrival time.  The fractional
# part of the arrival is realized with the transpose of the beamformer's
# 2-tap interpolation: sample k of the trace receives
#   amp * ((1 - f) * p[k - c0] + f * p[k - c0 - 1])
# which equals linear interpolation of the pulse table at (k - c0 - f).
# ---------------------------------------------------------------------------

def deposit_numpy(traces, scat_x, scat_z, refl, tx_idx, tx_delay, tx_apod,
                  elem_x, pulse, jmin, fs, c):
    nch, ns = traces.shape
    npulse = pulse.shape[0]
    p_ext = np.concatenate([pulse, [0.0]])
    p_prev = np.concatenate([[0.0], pulse])
    for s in range(scat_x.shape[0]):
        for mi in range(tx_idx.shape[0]):
            m = tx_idx[mi]
            dxt = scat_x[s] - elem_x[m]
            r_tx = np.sqrt(dxt * dxt + scat_z[s] * scat_z[s])
            for n in range(nch):
                dxr = scat_x[s] - elem_x[n]
                r_rx = np.sqrt(dxr * dxr + scat_z[s] * scat_z[s])
                t = tx_delay[mi] + (r_tx + r_rx) / c
                amp = refl[s] * tx_apod[mi] / (r_tx * r_rx)
                pos = t * fs
                c0 = int(np.floor(pos))
                f = pos - c0
                a0 = c0 + jmin
                lo = max(0, -a0)
                hi = min(npulse + 1, ns - a0)
                if hi <= lo:
                    continue
                seg = amp * ((1.0 - f) * p_ext + f * p_prev)
                traces[n, a0 + lo:a0 + hi] += seg[lo:hi]


if BACKEND == "numba":
    from numba import njit, prange

    @njit(cache=True, parallel=True)
    def _das_grid_numba(rf, elem_x, weights, t_tx, xs, zs, fs, c):
        nch, ns = rf.shape
        nz = zs.shape[0]
        nx = xs.shape[0]
        out = np.zeros((nz, nx))
        for iz in prange(nz):
            dz = zs[iz]
            for ix in range(nx):
                acc = 0.0
                for n in range(nch):
                    dx = xs[ix] - elem_x[n]
                    t = t_tx[iz, ix] + np.sqrt(dx * dx + dz * dz) / c
                    pos = t * fs
                    c0 = int(np.floor(pos))
                    f = pos - c0
                    if c0 >= 0 and c0 + 1 <= ns - 1:
                        val = rf[n, c0] * (1.0 - f) + rf[n, c0 + 1] * f
                    else:
                        val = 0.0
                    acc += weights[n] * val
                out[iz, ix] = acc
        return out

    @njit(cache=True)
    def _deposit_numba(traces, scat_x, scat_z, refl, tx_idx, tx_delay, tx_apod,
                       elem_x, pulse, jmin, fs, c):
        nch, ns = traces.shape
        npulse = pulse.shape[0]
        for s in range(scat_x.shape[0]):
            for mi in range(tx_idx.shape[0]):
                m = tx_idx[mi]
                dxt = scat_x[s] - elem_x[m]
                r_tx = np.sqrt(dxt * dxt + scat_z[s] * scat_z[s])
                for n in range(nch):
                    dxr = scat_x[s] - elem_x[n]
                    r_rx = np.sqrt(dxr * dxr + scat_z[s] * scat_z[s])
                    t = tx_delay[mi] + (r_tx + r_rx) / c
                    amp = refl[s] * tx_apod[mi] / (r_tx * r_rx)
                    pos = t * fs
                    c0 = int(np.floor(pos))
                    f = pos - c0
                    a0 = c0 + jmin
                    lo = max(0, -a0)
                    hi = min(npulse + 1, ns - a0)
                    for i in range(lo, hi):
                        a = pulse[i] if i < npulse else 0.0
                        b = pulse[i - 1] if i >= 1 else 0.0
                        traces[n, a0 + i] += amp * ((1.0 - f) * a + f * b)

    das_grid = _das_grid_numba
    deposit = _deposit_numba
else:
    das_grid = das_grid_numpy
    deposit = deposit_numpy
