"""Dataset evaluation: distance metrics, ring hits, summaries, grid search.

Ground truth and predictions are compared in original-image pixels. Each
dataset entry couples an image with its ground-truth pith, an optional
foreground mask file and optional ring polygons (innermost first) used for
the ring-index metric.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np
from shapely.geometry import Point, Polygon

from .errors import PithError
from .imageprep import derive_mask, prepare, read_mask, read_rgb
from .pipeline import DetectionParams, detect_pith, to_original_coords

log = logging.getLogger(__name__)

DIAMETER_RAYS = 180
DIAMETER_STEP = 0.5
NORMALIZATION_FACTOR = 1000.0

SUMMARY_STATS = ("mean", "std", "median", "p90", "p95", "max")


@dataclass
class DatasetEntry:
    """One evaluation case; paths may be None for in-memory data."""

    id: str
    image_path: Path | None
    mask_path: Path | None
    gt_pith: tuple[float, float]
    rings: list[np.ndarray]


@dataclass
class EvaluationRecord:
    """Per-image outcome; ring fields are None without ring annotations."""

    id: str
    prediction: tuple[float, float]
    dist: float
    norm_dist: float
    ring_index: int | None
    is_tp: bool | None


@dataclass
class GridResult:
    params: DetectionParams
    mean_dist: float
    mean_norm_dist: float
    n_images: int
    n_failed: int


def euclidean_dist(dt, gt) -> float:
    """Euclidean distance between a prediction and the ground truth."""
    return math.hypot(dt[0] - gt[0], dt[1] - gt[1])


def _chord_length(mask: np.ndarray, gt, theta: float, step: float) -> float:
    height, width = mask.shape
    t_max = math.hypot(width, height)
    ts = np.arange(step, t_max + step, step)
    total = 0.0
    for sign in (1.0, -1.0):
        px = np.floor(gt[0] + sign * ts * math.cos(theta) + 0.5).astype(np.int64)
        py = np.floor(gt[1] + sign * ts * math.sin(theta) + 0.5).astype(np.int64)
        inside = (px >= 0) & (px < width) & (py >= 0) & (py < height)
        covered = np.zeros(ts.shape, dtype=bool)
        covered[inside] = mask[py[inside], px[inside]]
        misses = np.nonzero(~covered)[0]
        if misses.size:
            reach = ts[misses[0] - 1] if misses[0] > 0 else 0.0
        else:
            reach = ts[-1] if ts.size else 0.0
        total += reach
    return total


def max_diameter(mask: np.ndarray, gt, n_rays: int = DIAMETER_RAYS, step: float = DIAMETER_STEP) -> float:
    """Longest foreground chord through gt over n_rays evenly spaced angles.

    Each chord walks outward from gt in half-pixel steps, in both
    directions, until it leaves the mask; the default 180 rays are 2 degrees
    apart.
    """
    gx, gy = int(math.floor(gt[0] + 0.5)), int(math.floor(gt[1] + 0.5))
    height, width = mask.shape
    if not (0 <= gx < width and 0 <= gy < height) or not mask[gy, gx]:
        raise ValueError(f"ground truth {gt} lies outside the foreground")
    spacing = 2.0 * math.pi / n_rays
    return max(_chord_length(mask, gt, k * spacing, step) for k in range(n_rays))


def normalized_dist(dist: float, d: float) -> float:
    """Distance as parts-per-thousand of the longest cross-section chord."""
    if d <= 0:
        raise ValueError(f"diameter must be positive, got {d}")
    return NORMALIZATION_FACTOR * dist / d


def ring_index(prediction, rings) -> int:
    """Index of the innermost ring polygon containing the prediction.

    Rings are ordered innermost first; a prediction outside every ring gets
    the sentinel value len(rings).
    """
    point = Point(prediction[0], prediction[1])
    for i, ring in enumerate(rings):
        if Polygon(ring).contains(point):
            return i
    return len(rings)


def precision(records) -> Fraction:
    """Fraction of annotated records whose prediction landed inside ring 0.

    Exact rational TP / (TP + FP); records without ring annotations do not
    participate.
    """
    scored = [r for r in records if r.is_tp is not None]
    if not scored:
        raise ValueError("no records with ring annotations")
    return Fraction(sum(1 for r in scored if r.is_tp), len(scored))


def summarize(records) -> dict:
    """Distance statistics over the records, per metric.

    Returns {"dist": {...}, "norm_dist": {...}} with mean, std, median, p90,
    p95 and max; quantiles use linear interpolation.
    """
    if not records:
        raise ValueError("no records to summarize")
    out = {}
    for name in ("dist", "norm_dist"):
        values = np.array([getattr(r, name) for r in records], dtype=np.float64)
        out[name] = {
            "mean": float(values.mean()),
            "std": float(values.std()),
            "median": float(np.median(values)),
            "p90": float(np.percentile(values, 90)),
            "p95": float(np.percentile(values, 95)),
            "max": float(values.max()),
        }
    return out


def load_rings(path) -> list[np.ndarray]:
    """Read ring polygons from a per-image JSON annotation file.

    The file holds named polygons with vertices in original-image pixels,
    innermost ring first. Nesting is validated: every ring must lie strictly
    inside the next one out.
    """
    data = json.loads(Path(path).read_text())
    rings = [np.asarray(ring["points"], dtype=np.float64) for ring in data["rings"]]
    for ring in rings:
        if ring.ndim != 2 or ring.shape[0] < 3 or ring.shape[1] != 2:
            raise ValueError(f"bad ring polygon in {path}")
    polys = [Polygon(r) for r in rings]
    for i, (inner, outer) in enumerate(zip(polys, polys[1:])):
        if not (inner.is_valid and outer.is_valid and outer.contains(inner)):
            raise ValueError(f"ring {i} is not nested inside ring {i + 1} in {path}")
    return rings


def load_manifest(path) -> list[DatasetEntry]:
    """Read a dataset manifest (CSV or JSON) into entries.

    Columns/keys: id, image_path, mask_path, gt_x, gt_y, annotation_path.
    Relative paths resolve against the manifest directory; empty mask or
    annotation paths mean "derive the mask" and "no rings".
    """
    path = Path(path)
    base = path.parent
    if path.suffix.lower() == ".json":
        rows = json.loads(path.read_text())
    else:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))

    def resolve(value):
        if value is None or str(value).strip() == "":
            return None
        p = Path(str(value))
        return p if p.is_absolute() else base / p

    entries = []
    for row in rows:
        rings_path = resolve(row.get("annotation_path"))
        rings = load_rings(rings_path) if rings_path else []
        gt = (float(row["gt_x"]), float(row["gt_y"]))
        if rings and not Polygon(rings[0]).contains(Point(gt)):
            raise ValueError(f"ground truth of {row['id']} lies outside ring 0")
        entries.append(
            DatasetEntry(
                id=str(row["id"]),
                image_path=resolve(row.get("image_path")),
                mask_path=resolve(row.get("mask_path")),
                gt_pith=gt,
                rings=rings,
            )
        )
    return entries


def evaluate_entry(entry: DatasetEntry, params: DetectionParams) -> EvaluationRecord:
    """Run detection on one entry and score it in original pixels."""
    rgb = read_rgb(entry.image_path)
    if entry.mask_path is not None:
        mask = read_mask(entry.mask_path, rgb.shape)
    else:
        mask = derive_mask(rgb)
    gray, mask_r = prepare(rgb, mask, params.new_shape)
    result = detect_pith(gray, mask_r, params)
    oh, ow = rgb.shape[:2]
    pred = to_original_coords((result.x, result.y), (ow, oh), params.new_shape)
    dist = euclidean_dist(pred, entry.gt_pith)
    norm = normalized_dist(dist, max_diameter(mask, entry.gt_pith))
    index = ring_index(pred, entry.rings) if entry.rings else None
    return EvaluationRecord(
        id=entry.id,
        prediction=pred,
        dist=dist,
        norm_dist=norm,
        ring_index=index,
        is_tp=(index == 0) if index is not None else None,
    )


def _evaluate_guarded(entry: DatasetEntry, params: DetectionParams):
    try:
        return entry.id, evaluate_entry(entry, params), None
    except (PithError, ValueError, OSError) as exc:
        return entry.id, None, f"{type(exc).__name__}: {exc}"


def evaluate_dataset(entries, params: DetectionParams, jobs: int = 1):
    """Evaluate every entry, tolerating per-image failures.

    Returns (records, failures) where failures is a list of (id, reason).
    Order follows the manifest regardless of scheduling.
    """
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_evaluate_guarded, entries, itertools.repeat(params)))
    else:
        outcomes = [_evaluate_guarded(entry, params) for entry in entries]
    records, failures = [], []
    for entry_id, record, reason in outcomes:
        if record is not None:
            records.append(record)
        else:
            log.warning("evaluation failed for %s: %s", entry_id, reason)
            failures.append((entry_id, reason))
    return records, failures


def table_grid() -> list[DetectionParams]:
    """The 96-point benchmark lattice over patch size, overlap, method and
    certainty threshold, with the remaining knobs fixed."""
    sizes = (20, 30, 50, 100)
    overlaps = (0.0, 0.2, 0.4, 0.5)
    methods = ("pca", "peak")
    thresholds = (0.75, 0.85, 0.95)
    return [
        DetectionParams(
            new_shape=1000,
            block_width_size=size,
            block_height_size=size,
            block_overlap=overlap,
            lo_method=method,
            lo_certainty_th=th,
            fft_peak_th=0.6,
            acc_type=0,
            peak_blur_sigma=3.0,
        )
        for size, overlap, method, th in itertools.product(
            sizes, overlaps, methods, thresholds
        )
    ]


def grid_search(entries, grid=None, jobs: int = 1) -> list[GridResult]:
    """Evaluate every configuration and rank them by mean distance.

    Images that fail under a configuration are excluded from its means with
    a warning; a configuration with no successful image ranks last. Ties on
    mean distance break on mean normalized distance.
    """
    if grid is None:
        grid = table_grid()
    results = []
    for params in grid:
        records, failures = evaluate_dataset(entries, params, jobs=jobs)
        if failures:
            log.warning(
                "%d/%d images failed for %s", len(failures), len(entries), params
            )
        if records:
            mean_dist = float(np.mean([r.dist for r in records]))
            mean_norm = float(np.mean([r.norm_dist for r in records]))
        else:
            mean_dist = mean_norm = math.inf
        results.append(
            GridResult(
                params=params,
                mean_dist=mean_dist,
                mean_norm_dist=mean_norm,
                n_images=len(records),
                n_failed=len(failures),
            )
        )
    results.sort(key=lambda r: (r.mean_dist, r.mean_norm_dist))
    return results


def write_records_csv(path, records, failures=()):
    """Per-image results, one row per manifest entry."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["id", "status", "pred_x", "pred_y", "dist", "norm_dist", "ring_index", "is_tp", "error"]
        )
        for r in records:
            writer.writerow(
                [
                    r.id,
                    "ok",
                    f"{r.prediction[0]:.4f}",
                    f"{r.prediction[1]:.4f}",
                    f"{r.dist:.4f}",
                    f"{r.norm_dist:.4f}",
                    "" if r.ring_index is None else r.ring_index,
                    "" if r.is_tp is None else int(r.is_tp),
                    "",
                ]
            )
        for entry_id, reason in failures:
            writer.writerow([entry_id, "error", "", "", "", "", "", "", reason])


def write_summary_csv(path, records):
    """Distance statistics plus a precision row when rings are available."""
    stats = summarize(records)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", *SUMMARY_STATS])
        for name in ("dist", "norm_dist"):
            writer.writerow([name] + [f"{stats[name][s]:.4f}" for s in SUMMARY_STATS])
        scored = [r for r in records if r.is_tp is not None]
        if scored:
            tp = sum(1 for r in scored if r.is_tp)
            fp = len(scored) - tp
            ratio = precision(scored)
            writer.writerow([])
            writer.writerow(["tp", "fp", "precision_pct"])
            writer.writerow([tp, fp, round(100 * ratio)])


def write_ring_histogram_csv(path, records):
    """Counts of predictions per ring index, for the hit histogram."""
    counts = Counter(r.ring_index for r in records if r.ring_index is not None)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ring_index", "count"])
        for index in sorted(counts):
            writer.writerow([index, counts[index]])


def write_grid_csv(path, results):
    """Ranked grid-search outcomes, best configuration first."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "rank",
                "block_width_size",
                "block_height_size",
                "block_overlap",
                "lo_method",
                "lo_certainty_th",
                "fft_peak_th",
                "acc_type",
                "peak_blur_sigma",
                "new_shape",
                "mean_dist",
                "mean_norm_dist",
                "n_images",
                "n_failed",
            ]
        )
        for rank, res in enumerate(results, start=1):
            p = res.params
            writer.writerow(
                [
                    rank,
                    p.block_width_size,
                    p.block_height_size,
                    p.block_overlap,
                    p.lo_method,
                    p.lo_certainty_th,
                    p.fft_peak_th,
                    p.acc_type,
                    p.peak_blur_sigma,
                    p.new_shape,
                    "" if math.isinf(res.mean_dist) else f"{res.mean_dist:.4f}",
                    "" if math.isinf(res.mean_norm_dist) else f"{res.mean_norm_dist:.4f}",
                    res.n_images,
                    res.n_failed,
                ]
            )
