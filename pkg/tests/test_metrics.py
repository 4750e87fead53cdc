import math

import numpy as np
import pytest

from stabeam import (
    ArrayGeometry,
    Image,
    ImageGrid,
    MethodRun,
    Phantom,
    RegionSpec,
    TransferModel,
    beamform_lri,
    data_transfer_bytes,
    envelope,
    metric_fwhm,
    metric_sidelobe,
    metric_snr,
    simulate_rf,
    snr_gain_report,
    sta_sequence,
    synthesize_hri,
    msta_sequence,
)
from stabeam.metrics import NOISE, SIGNAL


GRID = ImageGrid(-5e-3, 5e-3, 10e-3, 30e-3, 100, 100)
SIG = RegionSpec((-5e-3, 5e-3), (10e-3, 15e-3), SIGNAL)
NOI = RegionSpec((-5e-3, 5e-3), (22e-3, 30e-3), NOISE)


def env_image(values, grid=GRID):
    return Image(grid, values, "ENVELOPE")


class TestSnr:
    def test_definition(self):
        rng = np.random.default_rng(0)
        v = np.zeros((100, 100))
        v[:30] = 10.0
        v[60:] = rng.normal(0.0, 1.0, size=v[60:].shape)
        snr = metric_snr(env_image(np.abs(v) * np.sign(v) + 0.0), SIG, NOI)
        # note std of the noise block estimates 1.0 from ~4000 pixels
        assert snr == pytest.approx(20.0, abs=0.5)

    def test_equal_statistics_near_zero(self):
        rng = np.random.default_rng(1)
        v = np.abs(rng.normal(0.0, 1.0, size=(100, 100)))
        snr = metric_snr(env_image(v), SIG, NOI)
        # rms of |N(0,1)| is 1; std of |N(0,1)| is ~0.6 -> ratio ~4.4 dB cap
        assert abs(snr) < 6.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        v = np.abs(rng.normal(size=(100, 100)))
        a = metric_snr(env_image(v), SIG, NOI)
        b = metric_snr(env_image(123.0 * v), SIG, NOI)
        assert a == pytest.approx(b, abs=1e-9)

    def test_zero_noise_spread_is_infinite(self):
        v = np.ones((100, 100))
        assert metric_snr(env_image(v), SIG, NOI) == math.inf

    def test_overlapping_regions_rejected(self):
        bad = RegionSpec((-5e-3, 5e-3), (12e-3, 25e-3), NOISE)
        with pytest.raises(ValueError):
            metric_snr(env_image(np.ones((100, 100))), SIG, bad)

    def test_region_outside_grid_rejected(self):
        out = RegionSpec((1.0, 2.0), (1.0, 2.0), NOISE)
        with pytest.raises(ValueError):
            metric_snr(env_image(np.ones((100, 100))), SIG, out)


class TestFwhm:
    def test_gaussian_profile(self):
        sigma = 0.5e-3
        xs = GRID.x_coords
        profile = np.exp(-xs ** 2 / (2 * sigma ** 2))
        v = np.tile(profile[None, :], (100, 1))
        w = metric_fwhm(env_image(v), (0.0, 20e-3))
        assert w == pytest.approx(2.3548 * sigma, abs=GRID.dx)

    def test_constant_profile_unresolved(self):
        assert metric_fwhm(env_image(np.ones((100, 100))), (0.0, 20e-3)) is None

    def test_scale_invariance(self):
        sigma = 0.8e-3
        xs = GRID.x_coords
        v = np.tile(np.exp(-xs ** 2 / (2 * sigma ** 2))[None, :], (100, 1))
        a = metric_fwhm(env_image(v), (0.0, 20e-3))
        b = metric_fwhm(env_image(7.7 * v), (0.0, 20e-3))
        assert a == pytest.approx(b, rel=1e-9)

    def test_larger_aperture_resolves_finer(self, pulse):
        # full STA pipeline with 3 vs 8 elements, same point target
        target = (0.0, 22e-3)
        widths = {}
        for n in (3, 8):
            g = ArrayGeometry(n, 0.3e-3, 5e6, 40e6, 1540.0)
            ph = Phantom(np.array([[target[0], target[1], 1.0]]))
            rf = simulate_rf(ph, g, sta_sequence(g), pulse, 1600, noise_std=0.0, seed=0)
            grid = ImageGrid(-8e-3, 8e-3, 20e-3, 24e-3, 161, 32)
            hri = synthesize_hri([beamform_lri(rf, e, grid) for e in range(n)])
            widths[n] = metric_fwhm(envelope(hri), target)
        assert widths[8] < widths[3]


class TestSidelobe:
    def test_secondary_peak_level(self):
        profile = np.full(100, 1e-6)
        profile[50] = 1.0
        profile[49] = profile[51] = 0.5
        profile[20] = 0.1
        v = np.tile(profile[None, :], (100, 1))
        db = metric_sidelobe(env_image(v), (GRID.x_coords[50], 20e-3))
        assert db == pytest.approx(-20.0, abs=0.01)

    def test_monotone_profile_none(self):
        xs = GRID.x_coords
        v = np.tile(np.exp(-xs ** 2 / 2e-6)[None, :], (100, 1))
        assert metric_sidelobe(env_image(v), (0.0, 20e-3)) is None

    def test_hann_lowers_sidelobes(self, pulse):
        # aperture large enough that classic lateral sidelobes dominate
        g = ArrayGeometry(32, 0.3e-3, 5e6, 40e6, 1540.0)
        target = (0.0, 25e-3)
        ph = Phantom(np.array([[target[0], target[1], 1.0]]))
        rf = simulate_rf(ph, g, sta_sequence(g), pulse, 2048, noise_std=0.0, seed=0)
        grid = ImageGrid(-6e-3, 6e-3, 24e-3, 26e-3, 241, 25)
        levels = {}
        for apod in ("rect", "hann"):
            hri = synthesize_hri([beamform_lri(rf, e, grid, apod) for e in range(32)])
            levels[apod] = metric_sidelobe(envelope(hri), target)
        assert levels["hann"] < levels["rect"] < 0


class TestDataTransfer:
    def test_sta_default(self):
        m = TransferModel(8, 8, 4096, 2)
        assert data_transfer_bytes(m) == 524_288

    def test_pa_default(self):
        m = TransferModel(121, 8, 4096, 2)
        assert data_transfer_bytes(m) == 7_929_856

    def test_unit(self):
        assert data_transfer_bytes(TransferModel(1, 1, 1, 1)) == 1

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            TransferModel(0, 8, 4096, 2)

    def test_permutation_invariance(self):
        a = data_transfer_bytes(TransferModel(3, 5, 7, 2))
        b = data_transfer_bytes(TransferModel(7, 2, 3, 5))
        assert a == b == 210


def _pipeline_run(method, geometry, sequence, pulse, noise_std, seed, grid):
    ph = Phantom(np.array([[0.0, 22e-3, 1.0]]))
    rf = simulate_rf(ph, geometry, sequence, pulse, 1800,
                     noise_std=noise_std, seed=seed)
    hri = synthesize_hri([beamform_lri(rf, e, grid)
                          for e in range(sequence.num_emissions)])
    sig = RegionSpec((-2e-3, 2e-3), (21e-3, 23e-3), SIGNAL)
    noi = RegionSpec((-4e-3, 4e-3), (26e-3, 28e-3), NOISE)
    return MethodRun(
        method=method, image=envelope(hri), signal=sig, noise=noi,
        peak_hint=(0.0, 22e-3),
        transfer=TransferModel(sequence.num_emissions, geometry.num_elements, 1800, 2),
    )


class TestReport:
    grid = ImageGrid(-4e-3, 4e-3, 18e-3, 28e-3, 48, 48)

    def test_deterministic_rows(self, geometry8, pulse):
        seq = sta_sequence(geometry8)
        a = snr_gain_report([_pipeline_run("STA", geometry8, seq, pulse, 20.0, 5, self.grid)])
        b = snr_gain_report([_pipeline_run("STA", geometry8, seq, pulse, 20.0, 5, self.grid)])
        assert a == b

    def test_msta_beats_sta_snr(self, geometry8, pulse):
        sta = _pipeline_run("STA", geometry8, sta_sequence(geometry8),
                            pulse, 30.0, 11, self.grid)
        msta = _pipeline_run("MSTA", geometry8, msta_sequence(geometry8, 4, 4),
                             pulse, 30.0, 11, self.grid)
        rows = snr_gain_report([sta, msta])
        by_method = {r.method: r for r in rows}
        assert by_method["MSTA"].snr_db > by_method["STA"].snr_db

    def test_rows_sorted_by_method(self, geometry8, pulse):
        sta = _pipeline_run("STA", geometry8, sta_sequence(geometry8),
                            pulse, 10.0, 1, self.grid)
        msta = _pipeline_run("MSTA", geometry8, msta_sequence(geometry8, 4, 4),
                             pulse, 10.0, 1, self.grid)
        rows = snr_gain_report([sta, msta])
        assert [r.method for r in rows] == ["MSTA", "STA"]

    def test_bytes_ordering(self):
        sta = data_transfer_bytes(TransferModel(8, 8, 4096, 2))
        pa = data_transfer_bytes(TransferModel(121, 8, 4096, 2))
        assert sta < pa

    def test_mismatched_grids_rejected(self, geometry8, pulse):
        seq = sta_sequence(geometry8)
        a = _pipeline_run("STA", geometry8, seq, pulse, 10.0, 1, self.grid)
        other = ImageGrid(-4e-3, 4e-3, 18e-3, 28e-3, 48, 49)
        b = _pipeline_run("MSTA", geometry8, seq, pulse, 10.0, 1, other)
        with pytest.raises(ValueError):
            snr_gain_report([a, b])
