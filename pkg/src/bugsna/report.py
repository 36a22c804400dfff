"""Heatmap pixmaps and hashed artifact manifests."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .activity import CentralityMatrix

LOG_SCALE_FLOOR = 1e-3


def heatmap_intensities(values: np.ndarray, log_scale: bool = False) -> np.ndarray:
    """Grayscale 0..255, linear in value / max (dark = low); all-zero input stays black."""
    values = np.asarray(values, dtype=float)
    vmax = float(values.max()) if values.size else 0.0
    if vmax <= 0:
        return np.zeros(values.shape, dtype=np.uint8)
    if log_scale:
        scaled = np.log1p(values / LOG_SCALE_FLOOR) / np.log1p(vmax / LOG_SCALE_FLOOR)
    else:
        scaled = values / vmax
    # round half up, not half to even
    return np.floor(255.0 * scaled + 0.5).astype(np.uint8)


def ppm_bytes(pixels: np.ndarray) -> bytes:
    """Binary P6 pixmap with equal RGB channels."""
    h, w = pixels.shape
    rgb = np.repeat(pixels[:, :, None], 3, axis=2)
    return b"P6\n%d %d\n255\n" % (w, h) + rgb.tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    """Inverse of :func:`ppm_bytes` (grayscale channel only); used by tests."""
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit P6 pixmap")
    w, h = map(int, dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)[:, :, 0]


def emit_heatmap(matrix: CentralityMatrix, ordering: Sequence[str], image_path: str | Path,
                 csv_path: str | Path, cluster_of: Mapping[str, int] | None = None,
                 log_scale: bool = False) -> np.ndarray:
    """One pixel row per participant in ``ordering``, one column per window."""
    if matrix.values.size == 0:
        raise ValueError("cannot render an empty matrix")
    ordered = matrix.take(ordering)
    pixels = heatmap_intensities(ordered.values, log_scale)
    Path(image_path).write_bytes(ppm_bytes(pixels))
    with Path(csv_path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["participant", "cluster_id"] + [f"w{win.index}" for win in matrix.windows])
        for p, row in zip(ordered.participants, ordered.values):
            cid = "" if cluster_of is None else cluster_of[p]
            w.writerow([p, cid] + [repr(float(v)) for v in row])
    return pixels


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir: str | Path, files: Sequence[str], extra: Mapping | None = None,
                   name: str = "manifest.json") -> dict:
    out_dir = Path(out_dir)
    manifest = {"artifacts": {f: sha256_file(out_dir / f) for f in sorted(files)}}
    manifest.update(extra or {})
    (out_dir / name).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
