"""Synthetic test imagery with analytically known geometry.

The spider-web generator builds a disk of concentric sinusoidal rings on a
white backdrop, which gives a ground-truth center, a foreground mask and
ring polygons for free. The sinusoid patch generator produces a single
oriented wave for exercising the spectrum estimators.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import cv2
import numpy as np

from .evaluation import DatasetEntry
from .patchgrid import Patch

BACKGROUND_VALUE = 1.0
CRACK_VALUE = 0.08
RING_POLYGON_POINTS = 72


def _circle_polygon(center, radius, n=RING_POLYGON_POINTS):
    theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return np.stack(
        [center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)], axis=1
    )


def make_spiderweb(
    size: int,
    center: tuple[float, float] | None = None,
    ring_spacing: float = 20.0,
    contrast: float = 0.9,
    noise_sigma: float = 0.0,
    crack: tuple[float, float] | None = None,
    n_rays: int = 0,
    disk_radius: float | None = None,
    seed: int = 0,
):
    """Render a ring disk and return (gray, mask, entry).

    The intensity follows 0.5 + 0.5*contrast*cos(2*pi*r/ring_spacing), so
    rings repeat every ring_spacing pixels and the annotation polygons sit
    on the intensity minima, innermost first. crack is an optional
    (start_deg, width_deg) wedge wiped to a flat dark value; n_rays draws
    that many darkened radial spokes. Noise is additive Gaussian, clipped
    to [0, 1], deterministic for a given seed.
    """
    if ring_spacing < 3.0:
        raise ValueError(f"ring_spacing must be >= 3 px, got {ring_spacing}")
    if center is None:
        center = (size / 2.0, size / 2.0)
    if not (0 <= center[0] < size and 0 <= center[1] < size):
        raise ValueError(f"center {center} outside {size}x{size} image")
    if disk_radius is None:
        disk_radius = 0.45 * size

    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    dx, dy = xx - center[0], yy - center[1]
    r = np.hypot(dx, dy)
    gray = 0.5 + 0.5 * contrast * np.cos(2.0 * math.pi * r / ring_spacing)

    theta = np.arctan2(dy, dx)
    if n_rays > 0:
        for k in range(n_rays):
            ray = -math.pi + (2.0 * math.pi * k) / n_rays
            width = 0.01
            hit = np.abs(np.mod(theta - ray + math.pi, 2.0 * math.pi) - math.pi) < width
            gray[hit] *= 0.5
    if crack is not None:
        start, width = math.radians(crack[0]), math.radians(crack[1])
        off = np.mod(theta - start, 2.0 * math.pi)
        gray[off < width] = CRACK_VALUE

    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        gray = gray + rng.normal(0.0, noise_sigma, gray.shape)
    gray = np.clip(gray, 0.0, 1.0)

    mask = r <= disk_radius
    gray[~mask] = BACKGROUND_VALUE

    rings = []
    radius = 0.5 * ring_spacing
    while radius < disk_radius - 0.5 * ring_spacing:
        rings.append(_circle_polygon(center, radius))
        radius += ring_spacing
    entry = DatasetEntry(
        id=f"web{seed}", image_path=None, mask_path=None, gt_pith=center, rings=rings
    )
    return gray.astype(np.float32), mask, entry


def make_sinusoid_patch(size: int, angle: float, cycles: float) -> Patch:
    """A single plane wave varying along ``angle`` with the given cycle count.

    The intensity is 0.5 + 0.5*cos(2*pi*cycles*s/size) where s is the
    coordinate along the wave normal, so the spectrum carries one symmetric
    bin pair at radius ``cycles`` in the normal direction.
    """
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    s = math.cos(angle) * xx + math.sin(angle) * yy
    pixels = 0.5 + 0.5 * np.cos(2.0 * math.pi * cycles * s / size)
    half = (size - 1) / 2.0
    return Patch(pixels=pixels.astype(np.float32), center=(half, half), foreground_fraction=1.0)


def write_dataset(out_dir, webs) -> Path:
    """Write (gray, mask, entry) triples as files plus a manifest CSV.

    Images go to disk as RGB PNGs with the white backdrop kept, masks as
    0/255 PNGs and rings as per-image JSON. Returns the manifest path.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for gray, mask, entry in webs:
        stem = entry.id
        image_path = out_dir / f"{stem}.png"
        mask_path = out_dir / f"{stem}_mask.png"
        rings_path = out_dir / f"{stem}_rings.json"
        level = np.round(np.asarray(gray, dtype=np.float64) * 255.0).astype(np.uint8)
        cv2.imwrite(str(image_path), np.stack([level] * 3, axis=2))
        cv2.imwrite(str(mask_path), mask.astype(np.uint8) * 255)
        rings_path.write_text(
            json.dumps(
                {
                    "rings": [
                        {"name": f"ring{i}", "points": ring.tolist()}
                        for i, ring in enumerate(entry.rings)
                    ]
                }
            )
        )
        rows.append(
            {
                "id": stem,
                "image_path": image_path.name,
                "mask_path": mask_path.name,
                "gt_x": entry.gt_pith[0],
                "gt_y": entry.gt_pith[1],
                "annotation_path": rings_path.name,
            }
        )
    manifest = out_dir / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    return manifest
