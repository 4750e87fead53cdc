"""JSON run configuration: schema, defaults, validation, manifest round-trip."""

import json
from dataclasses import dataclass

import numpy as np

from .beamform import ImageGrid
from .geometry import ArrayGeometry
from .metrics import NOISE, SIGNAL, RegionSpec
from .simulate import Phantom

SCHEMA_VERSION = 1

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "geometry": {
        "num_elements": 8,
        "pitch": 0.3e-3,
        "center_frequency": 5e6,
        "sampling_frequency": 40e6,
        "sound_speed": 1540.0,
    },
    "mode": {
        "name": "sta",
        "msta": {
            "subaperture_size": 4,
            "stride": None,              # defaults to subaperture_size (disjoint)
            "virtual_source_depth": None,  # defaults from subaperture width
        },
        "pa": {
            "focus_depth": 25e-3,
            "num_scanlines": 121,
        },
    },
    "phantom": {
        "scatterers": [[0.0, 25e-3, 1.0]],
        "file": None,
    },
    "simulation": {
        "num_samples": 4096,
        "noise_std": 0.0,
        "seed": 0,
        "fractional_bandwidth": 0.6,
    },
    "imaging": {
        "x_min": -5e-3, "x_max": 5e-3,
        "z_min": 15e-3, "z_max": 35e-3,
        "nx": 128, "nz": 128,
        "apodization": "rect",
        "dynamic_range": 60.0,
    },
    "metrics": {
        "signal_region": None,  # default: box around the first scatterer
        "noise_region": None,   # default: deepest 15% of the grid
        "bytes_per_sample": 2,
    },
    "output": {
        "dir": "out",
    },
}


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


def _merge(defaults, given, path):
    if not isinstance(given, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    out = {}
    for key, dval in defaults.items():
        here = f"{path}.{key}" if path else key
        if key in given:
            gval = given[key]
            if isinstance(dval, dict):
                out[key] = _merge(dval, gval, here)
            else:
                out[key] = gval
        else:
            out[key] = json.loads(json.dumps(dval))  # deep copy
    for key in given:
        if key not in defaults:
            here = f"{path}.{key}" if path else key
            raise ConfigError(f"{here}: unknown field")
    return out


def _require(cond, field, message):
    if not cond:
        raise ConfigError(f"{field}: {message}")


def _number(raw, field, minimum=None, strict=False, integer=False):
    ok = isinstance(raw, (int, float)) and not isinstance(raw, bool)
    _require(ok, field, "expected a number")
    if integer:
        _require(float(raw).is_integer(), field, "expected an integer")
        raw = int(raw)
    if minimum is not None:
        if strict:
            _require(raw > minimum, field, f"must be > {minimum}")
        else:
            _require(raw >= minimum, field, f"must be >= {minimum}")
    return raw


@dataclass(frozen=True)
class RunConfig:
    geometry: ArrayGeometry
    mode_name: str
    msta_subaperture_size: int
    msta_stride: int
    msta_virtual_source_depth: float | None
    pa_focus_depth: float
    pa_num_scanlines: int
    phantom: Phantom
    num_samples: int
    noise_std: float
    seed: int
    fractional_bandwidth: float
    grid: ImageGrid
    apodization: str
    dynamic_range: float
    signal_region: RegionSpec
    noise_region: RegionSpec
    bytes_per_sample: int
    output_dir: str
    raw: dict  # effective config dict (defaults applied), for the manifest


def _default_regions(grid, phantom):
    if phantom.num_scatterers:
        sx, sz = phantom.scatterers[0, 0], phantom.scatterers[0, 1]
    else:
        sx = (grid.x_min + grid.x_max) / 2
        sz = (grid.z_min + grid.z_max) / 2
    hx = (grid.x_max - grid.x_min) * 0.2
    hz = (grid.z_max - grid.z_min) * 0.1
    signal = [[sx - hx, sx + hx], [sz - hz, sz + hz]]
    noise_lo = grid.z_max - (grid.z_max - grid.z_min) * 0.15
    noise = [[grid.x_min, grid.x_max], [noise_lo, grid.z_max]]
    return signal, noise


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(raw, base_path=path)


def parse_config(raw, base_path=""):
    cfg = _merge(DEFAULTS, raw, "")
    _require(cfg["schema_version"] == SCHEMA_VERSION, "schema_version",
             f"unsupported version (expected {SCHEMA_VERSION})")

    g = cfg["geometry"]
    try:
        geometry = ArrayGeometry(
            num_elements=_number(g["num_elements"], "geometry.num_elements", 1, integer=True),
            pitch=_number(g["pitch"], "geometry.pitch", 0, strict=True),
            center_frequency=_number(g["center_frequency"], "geometry.center_frequency", 0, strict=True),
            sampling_frequency=_number(g["sampling_frequency"], "geometry.sampling_frequency", 0, strict=True),
            sound_speed=_number(g["sound_speed"], "geometry.sound_speed", 0, strict=True),
        )
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from exc

    m = cfg["mode"]
    _require(m["name"] in ("sta", "msta", "pa"), "mode.name", "must be sta, msta or pa")
    sub = _number(m["msta"]["subaperture_size"], "mode.msta.subaperture_size", 1, integer=True)
    _require(sub <= geometry.num_elements, "mode.msta.subaperture_size",
             "must not exceed geometry.num_elements")
    stride = m["msta"]["stride"]
    if stride is None:
        stride = sub
    stride = _number(stride, "mode.msta.stride", 1, integer=True)
    zv = m["msta"]["virtual_source_depth"]
    if zv is not None:
        zv = _number(zv, "mode.msta.virtual_source_depth", 0, strict=True)
    focus_depth = _number(m["pa"]["focus_depth"], "mode.pa.focus_depth", 0, strict=True)
    nlines = _number(m["pa"]["num_scanlines"], "mode.pa.num_scanlines", 1, integer=True)

    ph = cfg["phantom"]
    scatterers = ph["scatterers"]
    if ph["file"] is not None:
        try:
            with open(ph["file"], "r", encoding="utf-8") as fh:
                scatterers = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"phantom.file: cannot read {ph['file']}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"phantom.file: invalid JSON: {exc}") from exc
    try:
        phantom = Phantom(np.asarray(scatterers, dtype=float).reshape(-1, 3))
    except ValueError as exc:
        raise ConfigError(f"phantom.scatterers: {exc}") from exc

    sim = cfg["simulation"]
    num_samples = _number(sim["num_samples"], "simulation.num_samples", 1, integer=True)
    noise_std = _number(sim["noise_std"], "simulation.noise_std", 0)
    seed = _number(sim["seed"], "simulation.seed", 0, integer=True)
    bw = _number(sim["fractional_bandwidth"], "simulation.fractional_bandwidth", 0, strict=True)
    _require(bw < 2, "simulation.fractional_bandwidth", "must be < 2")

    im = cfg["imaging"]
    try:
        grid = ImageGrid(
            x_min=_number(im["x_min"], "imaging.x_min"),
            x_max=_number(im["x_max"], "imaging.x_max"),
            z_min=_number(im["z_min"], "imaging.z_min"),
            z_max=_number(im["z_max"], "imaging.z_max"),
            nx=_number(im["nx"], "imaging.nx", 1, integer=True),
            nz=_number(im["nz"], "imaging.nz", 1, integer=True),
        )
    except ValueError as exc:
        raise ConfigError(f"imaging: {exc}") from exc
    _require(im["apodization"] in ("rect", "hann"), "imaging.apodization",
             "must be rect or hann")
    dr = _number(im["dynamic_range"], "imaging.dynamic_range", 0, strict=True)

    me = cfg["metrics"]
    sig_raw, noi_raw = me["signal_region"], me["noise_region"]
    if sig_raw is None or noi_raw is None:
        dsig, dnoi = _default_regions(grid, phantom)
        sig_raw = sig_raw if sig_raw is not None else dsig
        noi_raw = noi_raw if noi_raw is not None else dnoi
        me["signal_region"], me["noise_region"] = sig_raw, noi_raw
    try:
        signal_region = RegionSpec(tuple(sig_raw[0]), tuple(sig_raw[1]), SIGNAL)
        noise_region = RegionSpec(tuple(noi_raw[0]), tuple(noi_raw[1]), NOISE)
    except (ValueError, TypeError, IndexError) as exc:
        raise ConfigError(f"metrics regions: {exc}") from exc
    bps = _number(me["bytes_per_sample"], "metrics.bytes_per_sample", 1, integer=True)

    out_dir = cfg["output"]["dir"]
    _require(isinstance(out_dir, str) and out_dir, "output.dir", "expected a nonempty string")

    return RunConfig(
        geometry=geometry,
        mode_name=m["name"],
        msta_subaperture_size=sub,
        msta_stride=stride,
        msta_virtual_source_depth=zv,
        pa_focus_depth=focus_depth,
        pa_num_scanlines=nlines,
        phantom=phantom,
        num_samples=num_samples,
        noise_std=float(noise_std),
        seed=seed,
        fractional_bandwidth=float(bw),
        grid=grid,
        apodization=im["apodization"],
        dynamic_range=float(dr),
        signal_region=signal_region,
        noise_region=noise_region,
        bytes_per_sample=bps,
        output_dir=out_dir,
        raw=cfg,
    )


def manifest_bytes(config):
    """Effective configuration (defaults applied), stable byte serialization."""
    return (json.dumps(config.raw, indent=2, sort_keys=True) + "\n").encode("utf-8")
