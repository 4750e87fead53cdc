"""Command-line front end: simulate, beamform, metrics, compare.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

import argparse
import os
import sys

import numpy as np

from . import formats
from .beamform import ENVELOPE, beamform_lri, beamform_pa, synthesize_hri
from .config import ConfigError, load_config, manifest_bytes
from .geometry import msta_sequence, pa_sequence, sta_sequence
from .metrics import NOISE, SIGNAL, MethodRun, TransferModel, snr_gain_report
from .postproc import envelope, log_compress, to_pgm_bytes
from .simulate import PulseModel, simulate_rf


def build_sequence(config, mode_name=None):
    mode = mode_name or config.mode_name
    if mode == "sta":
        return sta_sequence(config.geometry)
    if mode == "msta":
        return msta_sequence(
            config.geometry,
            config.msta_subaperture_size,
            config.msta_stride,
            config.msta_virtual_source_depth,
        )
    if mode == "pa":
        scanlines = np.linspace(config.grid.x_min, config.grid.x_max,
                                config.pa_num_scanlines)
        return pa_sequence(config.geometry, config.pa_focus_depth, scanlines)
    raise ConfigError(f"mode.name: unknown mode {mode!r}")


def build_pulse(config):
    return PulseModel(config.geometry.center_frequency,
                      fractional_bandwidth=config.fractional_bandwidth)


def _write_manifest(config, out_dir):
    with open(os.path.join(out_dir, "manifest.json"), "wb") as fh:
        fh.write(manifest_bytes(config))


def run_simulate(config, out_dir, mode_name=None):
    mode = mode_name or config.mode_name
    sequence = build_sequence(config, mode)
    rf = simulate_rf(config.phantom, config.geometry, sequence, build_pulse(config),
                     config.num_samples, noise_std=config.noise_std, seed=config.seed)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"rf_{mode}.starf")
    formats.write_rf(path, rf)
    nbytes = rf.samples.size * 4
    print(f"{mode}: {sequence.num_emissions} emissions, "
          f"{config.geometry.num_elements} channels, "
          f"{config.num_samples} samples, {nbytes} data bytes -> {path}")
    return rf, path


def _image_meta(config, rf, method):
    return {
        "method": method,
        "emissions": rf.sequence.num_emissions,
        "channels": rf.geometry.num_elements,
        "samples_per_emission": rf.num_samples,
        "bytes_per_sample": config.bytes_per_sample,
    }


def run_beamform(config, rf, out_dir, emit_lri=False):
    if rf.geometry != config.geometry:
        raise ConfigError("RF dataset geometry does not match the configuration")
    os.makedirs(out_dir, exist_ok=True)
    if rf.sequence.mode == "PA":
        if emit_lri:
            raise ConfigError("LRI undefined for PA mode")
        image = beamform_pa(rf, config.grid, config.apodization)
        prefix = "pa"
        meta = _image_meta(config, rf, "PA")
    else:
        lris = [beamform_lri(rf, e, config.grid, config.apodization)
                for e in range(rf.sequence.num_emissions)]
        if emit_lri:
            for e, lri in enumerate(lris):
                formats.write_image(os.path.join(out_dir, f"lri_{e:03d}.stim"), lri)
        image = synthesize_hri(lris)
        prefix = "hri"
        meta = _image_meta(config, rf, rf.sequence.mode)
    env = envelope(image)
    db = log_compress(env, config.dynamic_range)
    formats.write_image(os.path.join(out_dir, f"{prefix}.stim"), image, meta)
    formats.write_image(os.path.join(out_dir, f"{prefix}_env.stim"), env, meta)
    formats.write_image(os.path.join(out_dir, f"{prefix}_db.stim"), db, meta)
    with open(os.path.join(out_dir, f"{prefix}.pgm"), "wb") as fh:
        fh.write(to_pgm_bytes(db, config.dynamic_range))
    print(f"{meta['method']}: wrote {prefix}.stim / {prefix}_env.stim / "
          f"{prefix}_db.stim / {prefix}.pgm in {out_dir}")
    return env, meta


def _method_run(config, env, meta):
    hint = (sum(config.signal_region.x_range) / 2.0,
            sum(config.signal_region.z_range) / 2.0)
    transfer = TransferModel(
        emissions=int(meta["emissions"]),
        channels=int(meta["channels"]),
        samples_per_emission=int(meta["samples_per_emission"]),
        bytes_per_sample=int(meta["bytes_per_sample"]),
    )
    return MethodRun(
        method=str(meta["method"]),
        image=env,
        signal=config.signal_region,
        noise=config.noise_region,
        peak_hint=hint,
        transfer=transfer,
    )


def run_metrics(config, image_paths, out_dir, csv_name="report.csv"):
    runs = []
    for path in image_paths:
        image, extra = formats.read_image(path)
        if image.kind != ENVELOPE:
            raise ConfigError(f"{path}: expected an ENVELOPE image, got {image.kind}")
        if "method" not in extra:
            raise ConfigError(f"{path}: image carries no method metadata")
        runs.append(_method_run(config, image, extra))
    rows = snr_gain_report(runs)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, csv_name)
    with open(csv_path, "wb") as fh:
        fh.write(formats.report_csv_bytes(rows))
    print(formats.format_report_table(rows))
    print(f"wrote {csv_path}")
    return rows


def run_compare(config, out_dir, emit_lri=False):
    runs = []
    for mode in ("sta", "msta", "pa"):
        sub_dir = os.path.join(out_dir, mode)
        os.makedirs(sub_dir, exist_ok=True)
        rf, _ = run_simulate(config, sub_dir, mode_name=mode)
        env, meta = run_beamform(config, rf, sub_dir,
                                 emit_lri=emit_lri and mode != "pa")
        runs.append(_method_run(config, env, meta))
    rows = snr_gain_report(runs)
    csv_path = os.path.join(out_dir, "compare.csv")
    with open(csv_path, "wb") as fh:
        fh.write(formats.report_csv_bytes(rows))
    print(formats.format_report_table(rows))
    print(f"wrote {csv_path}")
    return rows


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="sta-beam",
        description="Synthetic transmit aperture ultrasound pipeline: "
                    "simulation, beamforming, B-mode display and metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out-dir", help="override output.dir from the config")

    p = sub.add_parser("simulate", help="generate an RF dataset file")
    common(p)
    p = sub.add_parser("beamform", help="beamform an RF dataset into images")
    common(p)
    p.add_argument("--rf", required=True, help="STARF1 input file")
    p.add_argument("--emit-lri", action="store_true",
                   help="also write the per-emission low-resolution images")
    p = sub.add_parser("metrics", help="compute the metrics report for envelope images")
    common(p)
    p.add_argument("images", nargs="+", help="ENVELOPE-kind STAIM1 files")
    p = sub.add_parser("compare", help="run simulate/beamform/metrics for STA, MSTA and PA")
    common(p)
    p.add_argument("--emit-lri", action="store_true")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        out_dir = args.out_dir or config.output_dir
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "simulate":
            run_simulate(config, out_dir)
        elif args.command == "beamform":
            rf = formats.read_rf(args.rf)
            run_beamform(config, rf, out_dir, emit_lri=args.emit_lri)
        elif args.command == "metrics":
            run_metrics(config, args.images, out_dir)
        elif args.command == "compare":
            run_compare(config, out_dir, emit_lri=args.emit_lri)
        _write_manifest(config, out_dir)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
