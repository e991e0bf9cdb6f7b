"""Command-line entry points: detect, eval and gridsearch."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

from .debugview import save_debug_images
from .errors import PithError
from .evaluation import (
    evaluate_dataset,
    grid_search,
    load_manifest,
    write_grid_csv,
    write_records_csv,
    write_ring_histogram_csv,
    write_summary_csv,
)
from .orientation import LO_METHODS
from .pipeline import DetectionParams, detect_file


def _add_detection_flags(parser, fft_peak_th_default=0.8):
    parser.add_argument("--new_shape", type=int, default=1000)
    parser.add_argument("--block_width_size", type=int, default=100)
    parser.add_argument("--block_height_size", type=int, default=100)
    parser.add_argument("--block_overlap", type=float, default=0.2)
    parser.add_argument("--lo_method", choices=LO_METHODS, default="pca")
    parser.add_argument("--lo_certainty_th", type=float, default=0.9)
    parser.add_argument("--fft_peak_th", type=float, default=fft_peak_th_default)
    parser.add_argument("--peak_blur_sigma", type=float, default=3.0)
    parser.add_argument("--acc_type", type=int, choices=(0, 1), default=0)


def _params_from_args(args) -> DetectionParams:
    return DetectionParams(
        new_shape=args.new_shape,
        block_width_size=args.block_width_size,
        block_height_size=args.block_height_size,
        block_overlap=args.block_overlap,
        lo_method=args.lo_method,
        lo_certainty_th=args.lo_certainty_th,
        fft_peak_th=args.fft_peak_th,
        acc_type=args.acc_type,
        peak_blur_sigma=args.peak_blur_sigma,
    )


def _write_error(out_dir, code, message):
    payload = json.dumps({"error": code, "message": message}, sort_keys=True)
    print(payload, file=sys.stderr)
    try:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "error.json").write_text(payload + "\n")
    except OSError:
        pass


def detect_command(args) -> int:
    params = _params_from_args(args)
    out_dir = Path(args.output_dir)
    try:
        started = time.perf_counter()
        found = detect_file(args.filename, args.mask, params)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
    except PithError as exc:
        _write_error(args.output_dir, exc.code, str(exc))
        return 1
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "id": Path(args.filename).stem,
        "x": found.x,
        "y": found.y,
        "params": dataclasses.asdict(params),
        "elapsed_ms": elapsed_ms,
    }
    (out_dir / "pith.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    if args.debug:
        from .imageprep import load_and_prepare

        gray, _ = load_and_prepare(args.filename, args.mask, params.new_shape)
        save_debug_images(
            out_dir,
            gray,
            found.resized.estimates,
            found.resized.accumulator,
            (found.resized.x, found.resized.y),
            params.peak_blur_sigma,
        )
    return 0


def eval_command(args) -> int:
    params = _params_from_args(args)
    out_dir = Path(args.output_dir)
    try:
        entries = load_manifest(args.manifest)
        if not entries:
            raise ValueError("manifest holds no entries")
    except (OSError, ValueError, KeyError) as exc:
        _write_error(args.output_dir, "bad_manifest", str(exc))
        return 1
    records, failures = evaluate_dataset(entries, params, jobs=args.jobs)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_records_csv(out_dir / "records.csv", records, failures)
    if records:
        write_summary_csv(out_dir / "summary.csv", records)
        write_ring_histogram_csv(out_dir / "ring_histogram.csv", records)
    if not records:
        _write_error(args.output_dir, "all_failed", "every image failed to evaluate")
        return 1
    return 0


def gridsearch_command(args) -> int:
    try:
        entries = load_manifest(args.manifest)
        if not entries:
            raise ValueError("manifest holds no entries")
    except (OSError, ValueError, KeyError) as exc:
        _write_error(args.output_dir, "bad_manifest", str(exc))
        return 1
    sizes = [int(v) for v in args.patch_sizes.split(",")]
    overlaps = [float(v) for v in args.overlaps.split(",")]
    methods = [m.strip() for m in args.methods.split(",")]
    thresholds = [float(v) for v in args.certainty_ths.split(",")]
    grid = [
        DetectionParams(
            new_shape=args.new_shape,
            block_width_size=size,
            block_height_size=size,
            block_overlap=overlap,
            lo_method=method,
            lo_certainty_th=th,
            fft_peak_th=args.fft_peak_th,
            acc_type=args.acc_type,
            peak_blur_sigma=args.peak_blur_sigma,
        )
        for size in sizes
        for overlap in overlaps
        for method in methods
        for th in thresholds
    ]
    results = grid_search(entries, grid, jobs=args.jobs)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_grid_csv(out_dir / "grid.csv", results)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pithfinder",
        description="Locate the pith of a tree cross-section photograph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="detect the pith in one image")
    detect.add_argument("--filename", required=True, help="input image path")
    detect.add_argument("--output_dir", required=True, help="where pith.json goes")
    detect.add_argument("--mask", default=None, help="optional foreground mask raster")
    detect.add_argument("--debug", action="store_true", help="write stage snapshots")
    _add_detection_flags(detect)
    detect.set_defaults(func=detect_command)

    evaluate = sub.add_parser("eval", help="evaluate a dataset manifest")
    evaluate.add_argument("--manifest", required=True)
    evaluate.add_argument("--output_dir", required=True)
    evaluate.add_argument("--jobs", type=int, default=1)
    _add_detection_flags(evaluate)
    evaluate.set_defaults(func=eval_command)

    grid = sub.add_parser("gridsearch", help="rank configurations on a manifest")
    grid.add_argument("--manifest", required=True)
    grid.add_argument("--output_dir", required=True)
    grid.add_argument("--jobs", type=int, default=1)
    grid.add_argument("--patch_sizes", default="20,30,50,100")
    grid.add_argument("--overlaps", default="0,0.2,0.4,0.5")
    grid.add_argument("--methods", default="pca,peak")
    grid.add_argument("--certainty_ths", default="0.75,0.85,0.95")
    _add_detection_flags(grid, fft_peak_th_default=0.6)
    grid.set_defaults(func=gridsearch_command)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
