"""Bit-exact file formats: STARF1 RF datasets, STAIM1 images, PGM and CSV.

Both binary formats are a UTF-8 header (magic line, ``key=value`` metadata
lines, a ``DATA`` line) followed by little-endian float32 payload.  Numbers in
headers are serialized with ``json`` so floats round-trip exactly.
"""

import csv
import io
import json

import numpy as np

from .beamform import Image, ImageGrid
from .geometry import ArrayGeometry, TransmitEvent, TransmitSequence
from .simulate import RfDataSet

RF_MAGIC = "STARF1"
IMAGE_MAGIC = "STAIM1"


def _write_header(fh, magic, meta):
    fh.write(magic.encode("utf-8") + b"\n")
    for key, value in meta.items():
        fh.write(f"{key}={value}\n".encode("utf-8"))
    fh.write(b"DATA\n")


def _read_header(fh, magic):
    line = fh.readline().decode("utf-8").rstrip("\n")
    if line != magic:
        raise ValueError(f"bad magic: expected {magic}, got {line!r}")
    meta = {}
    while True:
        line = fh.readline()
        if not line:
            raise ValueError("truncated header: DATA line missing")
        line = line.decode("utf-8").rstrip("\n")
        if line == "DATA":
            return meta
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed header line {line!r}")
        meta[key] = value


def _event_dict(ev):
    return {
        "active": list(ev.active_elements),
        "delays": list(ev.delays),
        "apod": list(ev.apodization),
        "label": ev.label,
        "virtual_source": list(ev.virtual_source) if ev.virtual_source else None,
        "focus": list(ev.focus) if ev.focus else None,
        "delay_offset": ev.delay_offset,
    }


def _event_from_dict(d):
    return TransmitEvent(
        tuple(d["active"]),
        tuple(d["delays"]),
        tuple(d["apod"]),
        d["label"],
        virtual_source=tuple(d["virtual_source"]) if d["virtual_source"] else None,
        focus=tuple(d["focus"]) if d["focus"] else None,
        delay_offset=d["delay_offset"],
    )


def write_rf(path, rf):
    meta = {
        "num_elements": rf.geometry.num_elements,
        "pitch": json.dumps(rf.geometry.pitch),
        "center_frequency": json.dumps(rf.geometry.center_frequency),
        "sampling_frequency": json.dumps(rf.geometry.sampling_frequency),
        "sound_speed": json.dumps(rf.geometry.sound_speed),
        "mode": rf.sequence.mode,
        "num_emissions": rf.sequence.num_emissions,
        "num_samples": rf.num_samples,
        "noise_std": json.dumps(rf.noise_std),
        "seed": rf.seed,
        "events": json.dumps([_event_dict(ev) for ev in rf.sequence.events]),
        "scanlines": json.dumps(
            list(rf.sequence.scanlines) if rf.sequence.scanlines else None),
    }
    with open(path, "wb") as fh:
        _write_header(fh, RF_MAGIC, meta)
        fh.write(rf.samples.astype("<f4").tobytes())


def read_rf(path):
    with open(path, "rb") as fh:
        meta = _read_header(fh, RF_MAGIC)
        payload = fh.read()
    geometry = ArrayGeometry(
        num_elements=int(meta["num_elements"]),
        pitch=json.loads(meta["pitch"]),
        center_frequency=json.loads(meta["center_frequency"]),
        sampling_frequency=json.loads(meta["sampling_frequency"]),
        sound_speed=json.loads(meta["sound_speed"]),
    )
    events = tuple(_event_from_dict(d) for d in json.loads(meta["events"]))
    scanlines = json.loads(meta["scanlines"])
    sequence = TransmitSequence(
        events, meta["mode"],
        scanlines=tuple(scanlines) if scanlines else None)
    e = int(meta["num_emissions"])
    ch = geometry.num_elements
    ns = int(meta["num_samples"])
    expected = e * ch * ns * 4
    if len(payload) != expected:
        raise ValueError(f"payload is {len(payload)} bytes, expected {expected}")
    samples = np.frombuffer(payload, dtype="<f4").astype(float).reshape(e, ch, ns)
    return RfDataSet(samples, geometry, sequence,
                     noise_std=json.loads(meta["noise_std"]), seed=int(meta["seed"]))


def write_image(path, image, extra=None):
    g = image.grid
    meta = {
        "kind": image.kind,
        "x_min": json.dumps(g.x_min), "x_max": json.dumps(g.x_max),
        "z_min": json.dumps(g.z_min), "z_max": json.dumps(g.z_max),
        "nx": g.nx, "nz": g.nz,
    }
    for key, value in (extra or {}).items():
        meta[f"meta.{key}"] = value
    with open(path, "wb") as fh:
        _write_header(fh, IMAGE_MAGIC, meta)
        fh.write(image.values.astype("<f4").tobytes())


def read_image(path):
    """Returns (Image, extra-metadata dict)."""
    with open(path, "rb") as fh:
        meta = _read_header(fh, IMAGE_MAGIC)
        payload = fh.read()
    grid = ImageGrid(
        x_min=json.loads(meta["x_min"]), x_max=json.loads(meta["x_max"]),
        z_min=json.loads(meta["z_min"]), z_max=json.loads(meta["z_max"]),
        nx=int(meta["nx"]), nz=int(meta["nz"]),
    )
    expected = grid.nx * grid.nz * 4
    if len(payload) != expected:
        raise ValueError(f"payload is {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<f4").astype(float).reshape(grid.nz, grid.nx)
    extra = {k[len("meta."):]: v for k, v in meta.items() if k.startswith("meta.")}
    return Image(grid, values, meta["kind"]), extra


def _fmt(value, none_as="none"):
    if value is None:
        return none_as
    if isinstance(value, float):
        if value == float("inf"):
            return "inf"
        return json.dumps(value)
    return str(value)


def report_csv_bytes(rows):
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "snr_db", "fwhm_m", "sidelobe_db", "bytes_per_frame"])
    for r in rows:
        writer.writerow([r.method, _fmt(r.snr_db), _fmt(r.fwhm_m, "unresolved"),
                         _fmt(r.sidelobe_db), _fmt(r.bytes_per_frame)])
    return buf.getvalue().encode("utf-8")


def format_report_table(rows):
    header = ("method", "snr_db", "fwhm_m", "sidelobe_db", "bytes_per_frame")
    cells = [header]
    for r in rows:
        cells.append((r.method, _fmt(r.snr_db), _fmt(r.fwhm_m, "unresolved"),
                      _fmt(r.sidelobe_db), _fmt(r.bytes_per_frame)))
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
             for row in cells]
    return "\n".join(lines)
