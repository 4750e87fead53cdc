"""Benchmark the numba kernels against the pure-numpy fallback.

Runs both backends in one process (importing the numba variants directly,
regardless of STABEAM_BACKEND), times the delay-and-sum gather and the echo
deposition kernel on a realistic workload, and checks that the two paths agree
bit for bit.

Usage: python3 benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from stabeam import ArrayGeometry, ImageGrid, PulseModel
from stabeam.simulate import pulse_table
from stabeam.kernels import das_grid_numpy, deposit_numpy

try:
    from stabeam.kernels import _das_grid_numba, _deposit_numba
except ImportError:  # numba unavailable: kernels module only built the fallback
    import numba  # noqa: F401  -- re-raise with the real reason
    raise


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_das(repeats):
    rng = np.random.default_rng(0)
    g = ArrayGeometry(64, 0.3e-3, 5e6, 40e6, 1540.0)
    grid = ImageGrid(-8e-3, 8e-3, 10e-3, 50e-3, 256, 512)
    rf = rng.normal(size=(64, 4096))
    weights = np.ones(64)
    X, Z = np.meshgrid(grid.x_coords, grid.z_coords)
    t_tx = np.hypot(X, Z) / g.sound_speed
    args = (rf, g.element_x, weights, t_tx, grid.x_coords, grid.z_coords,
            g.sampling_frequency, g.sound_speed)

    ref = _das_grid_numba(*args)  # warm up / compile
    alt = das_grid_numpy(*args)
    assert np.array_equal(ref, alt), "backends disagree"

    t_nb = timeit(lambda: _das_grid_numba(*args), repeats)
    t_np = timeit(lambda: das_grid_numpy(*args), repeats)
    pixch = grid.nx * grid.nz * 64
    print(f"das_grid   ({grid.nx}x{grid.nz} px, 64 ch):"
          f"  numba {t_nb * 1e3:8.2f} ms   numpy {t_np * 1e3:8.2f} ms"
          f"   speedup {t_np / t_nb:5.1f}x"
          f"   ({pixch / t_nb / 1e6:.0f} Mreads/s)")


def bench_deposit(repeats):
    rng = np.random.default_rng(1)
    g = ArrayGeometry(64, 0.3e-3, 5e6, 40e6, 1540.0)
    table, jmin = pulse_table(PulseModel(g.center_frequency), g.sampling_frequency)
    nscat = 200
    scat_x = rng.uniform(-6e-3, 6e-3, nscat)
    scat_z = rng.uniform(10e-3, 45e-3, nscat)
    refl = rng.uniform(0.2, 1.0, nscat)
    tx_idx = np.arange(64, dtype=np.int64)
    tx_delay = np.zeros(64)
    tx_apod = np.ones(64)

    def run(kernel):
        traces = np.zeros((64, 4096))
        kernel(traces, scat_x, scat_z, refl, tx_idx, tx_delay, tx_apod,
               g.element_x, table, jmin, g.sampling_frequency, g.sound_speed)
        return traces

    ref = run(_deposit_numba)  # warm up / compile
    alt = run(deposit_numpy)
    assert np.array_equal(ref, alt), "backends disagree"

    t_nb = timeit(lambda: run(_deposit_numba), repeats)
    t_np = timeit(lambda: run(deposit_numpy), repeats)
    print(f"deposit    ({nscat} scat, 64 tx, 64 rx):"
          f"  numba {t_nb * 1e3:8.2f} ms   numpy {t_np * 1e3:8.2f} ms"
          f"   speedup {t_np / t_nb:5.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats; best of N is reported")
    args = ap.parse_args()
    print("backend parity verified bit-for-bit on both kernels\n")
    bench_das(args.repeats)
    bench_deposit(args.repeats)


if __name__ == "__main__":
    main()
