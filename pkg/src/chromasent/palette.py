"""Dominant-color extraction: image decoding into pixel sets, k-means
clustering in RGB space, and mapping of the resulting palette onto a named
color model.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

from .colors import ColorModel, RgbColor, ciede2000, nearest_model_color, srgb_to_lab
from .errors import EmptyImageError, InputError

__all__ = [
    "PixelSet",
    "PaletteEntry",
    "Palette",
    "MappedEntry",
    "MappedPalette",
    "KmeansResult",
    "load_pixels",
    "kmeans_init",
    "kmeans_cluster",
    "run_kmeans",
    "map_palette",
]

log = logging.getLogger(__name__)

DEFAULT_ALPHA_THRESHOLD = 8
DEFAULT_MAX_DIMENSION = 256
BACKGROUND_DELTA_E = 2.0
DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 100


@dataclass
class PixelSet:
    """Preprocessed pixels of one image as an (n, 3) uint8 array, plus the
    dimensions of the (possibly downscaled) image they came from."""

    pixels: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 2 or self.pixels.shape[1] != 3 or len(self.pixels) == 0:
            raise EmptyImageError("pixel set must be a non-empty (n, 3) array")

    def __len__(self) -> int:
        return len(self.pixels)


@dataclass(frozen=True)
class PaletteEntry:
    centroid: tuple[float, float, float]
    weight: float


@dataclass
class Palette:
    """Dominant colors of one image: real-valued RGB centroids with weights
    that sum to 1."""

    entries: list[PaletteEntry]

    def __post_init__(self):
        if not self.entries:
            raise InputError("palette must have at least one entry")
        for e in self.entries:
            if any(not (0.0 <= c <= 255.0) for c in e.centroid):
                raise InputError(f"centroid {e.centroid} outside [0, 255]")
        total = math.fsum(e.weight for e in self.entries)
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"palette weights sum to {total!r}, expected 1")


@dataclass(frozen=True)
class MappedEntry:
    color_id: int
    weight: float


@dataclass
class MappedPalette:
    """A palette re-expressed as model color ids, merged and sorted by
    descending weight (ties to the lowest id)."""

    entries: list[MappedEntry]

    def __post_init__(self):
        ids = [e.color_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise InputError("mapped palette ids must be unique")
        total = math.fsum(e.weight for e in self.entries)
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"mapped weights sum to {total!r}, expected 1")


def load_pixels(
    data: bytes,
    *,
    alpha_threshold: int = DEFAULT_ALPHA_THRESHOLD,
    drop_background: bool = False,
    max_dimension: int = DEFAULT_MAX_DIMENSION,
) -> PixelSet:
    """Decode an image into a set of RGB pixels.

    The image is downscaled by nearest-neighbor sampling so its larger side
    is at most ``max_dimension``, pixels with alpha below ``alpha_threshold``
    are dropped, and (optionally) pixels within a CIEDE2000 distance of
    ``BACKGROUND_DELTA_E`` of the most frequent border color are dropped.
    """
    if max_dimension < 1:
        raise InputError(f"max_dimension must be positive, got {max_dimension}")
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise InputError(f"could not decode image: {exc}") from exc

    img = img.convert("RGBA")
    w, h = img.size
    if max(w, h) > max_dimension:
        scale = max_dimension / max(w, h)
        w = max(1, round(w * scale))
        h = max(1, round(h * scale))
        img = img.resize((w, h), Image.NEAREST)

    arr = np.asarray(img, dtype=np.uint8)  # (h, w, 4)
    opaque = arr[:, :, 3] >= alpha_threshold

    keep = opaque
    if drop_background:
        border = np.zeros((h, w), dtype=bool)
        border[0, :] = border[-1, :] = True
        border[:, 0] = border[:, -1] = True
        border_rgb = arr[border & opaque][:, :3]
        if len(border_rgb):
            values, counts = np.unique(border_rgb, axis=0, return_counts=True)
            # most frequent border color; ties to the lowest (r, g, b) triple
            top = counts.max()
            candidates = values[counts == top]
            bg = min(map(tuple, candidates))
            bg_lab = srgb_to_lab(RgbColor(*(int(v) for v in bg)))
            uniq, inverse = np.unique(arr[:, :, :3].reshape(-1, 3), axis=0, return_inverse=True)
            near_bg = np.array(
                [
                    ciede2000(srgb_to_lab(RgbColor(*(int(v) for v in u))), bg_lab) < BACKGROUND_DELTA_E
                    for u in uniq
                ]
            )
            keep = opaque & ~near_bg[inverse].reshape(h, w)

    pixels = arr[keep][:, :3]
    if len(pixels) == 0:
        raise EmptyImageError("no pixels remain after preprocessing")
    return PixelSet(pixels=pixels, width=w, height=h)


def _distinct_count(pts: np.ndarray) -> int:
    return len(np.unique(pts, axis=0))


def _effective_k(pixels: PixelSet, k: int) -> int:
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    distinct = _distinct_count(pixels.pixels)
    if k > distinct:
        log.warning("k=%d exceeds %d distinct pixel values; reducing k", k, distinct)
        return distinct
    return k


def kmeans_init(pixels: PixelSet, k: int, seed: int, *, method: str = "weighted") -> np.ndarray:
    """Choose ``k`` initial centroids from the pixel population.

    ``weighted`` (default) picks the first centroid uniformly at random and
    each following one with probability proportional to the squared RGB
    distance to the nearest centroid chosen so far. ``uniform`` samples
    pixel positions uniformly without replacement. Both are fully
    determined by ``seed``; k is reduced to the number of distinct pixel
    values when it exceeds it.
    """
    k = _effective_k(pixels, k)
    pts = pixels.pixels.astype(np.float64)
    rng = np.random.default_rng(seed)
    n = len(pts)

    if method == "uniform":
        idx = rng.choice(n, size=k, replace=False)
        return pts[np.sort(idx)].copy()
    if method != "weighted":
        raise InputError(f"unknown init method: {method!r}")

    chosen = [int(rng.integers(n))]
    d2 = np.sum((pts - pts[chosen[0]]) ** 2, axis=1)
    while len(chosen) < k:
        total = d2.sum()
        # k <= distinct pixel count guarantees some positive distance remains
        idx = int(rng.choice(n, p=d2 / total))
        chosen.append(idx)
        d2 = np.minimum(d2, np.sum((pts - pts[idx]) ** 2, axis=1))
    return pts[chosen].copy()


@dataclass
class KmeansResult:
    """Clustering outcome plus diagnostics for invariant checks."""

    palette: Palette
    objective: float
    objectives: list[float] = field(default_factory=list)
    iterations: int = 0
    k: int = 0


def _assign(pts: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)  # argmin takes the lowest index on ties


def _wcss(pts: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    return float(((pts - centroids[labels]) ** 2).sum())


def _update(pts: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    k = len(centroids)
    new = centroids.copy()
    counts = np.bincount(labels, minlength=k)
    for j in range(k):
        if counts[j]:
            new[j] = pts[labels == j].mean(axis=0)
    if (counts == 0).any():
        # re-seed each empty cluster to the pixel farthest from its centroid
        dist = ((pts - new[labels]) ** 2).sum(axis=1)
        for j in np.flatnonzero(counts == 0):
            pick = int(dist.argmax())
            new[j] = pts[pick]
            dist[pick] = -1.0
    return new


def run_kmeans(
    pixels: PixelSet,
    k: int,
    seed: int = 42,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    init: str = "weighted",
    restarts: int = 1,
) -> KmeansResult:
    """Lloyd's algorithm on the RGB pixels, with diagnostics.

    Each iteration assigns pixels to the nearest centroid by Euclidean RGB
    distance and moves every centroid to the mean of its pixels; empty
    clusters are re-seeded to the farthest pixel. The loop stops when the
    largest centroid displacement falls below ``tol`` and the assignment is
    stable (so the final state is an exact fixed point), or after
    ``max_iter`` iterations. With ``restarts`` > 1 the best objective over
    seeds derived from ``seed`` wins.
    """
    if tol <= 0:
        raise InputError(f"tol must be > 0, got {tol}")
    if max_iter < 1:
        raise InputError(f"max_iter must be >= 1, got {max_iter}")
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")
    k = _effective_k(pixels, k)
    pts = pixels.pixels.astype(np.float64)
    n = len(pts)

    best: KmeansResult | None = None
    for r in range(restarts):
        centroids = kmeans_init(pixels, k, _restart_seed(seed, r), method=init)
        labels = _assign(pts, centroids)
        objectives = [_wcss(pts, labels, centroids)]
        iterations = 0
        for _ in range(max_iter):
            iterations += 1
            new_centroids = _update(pts, labels, centroids)
            disp = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
            centroids = new_centroids
            new_labels = _assign(pts, centroids)
            objectives.append(_wcss(pts, new_labels, centroids))
            stable = bool(np.array_equal(new_labels, labels))
            labels = new_labels
            if stable and disp < tol:
                break

        counts = np.bincount(labels, minlength=k)
        entries = [
            PaletteEntry(centroid=tuple(float(c) for c in centroids[j]), weight=int(counts[j]) / n)
            for j in range(k)
            if counts[j]
        ]
        result = KmeansResult(
            palette=Palette(entries=entries),
            objective=objectives[-1],
            objectives=objectives,
            iterations=iterations,
            k=k,
        )
        if best is None or result.objective < best.objective:
            best = result
    assert best is not None
    return best


def _restart_seed(seed: int, restart: int) -> int:
    if restart == 0:
        return seed
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(restart,)).generate_state(1)[0])


def kmeans_cluster(
    pixels: PixelSet,
    k: int,
    seed: int = 42,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    init: str = "weighted",
    restarts: int = 1,
) -> Palette:
    """Cluster pixels into at most ``k`` dominant colors with pixel-share
    weights. See :func:`run_kmeans` for the iteration contract."""
    return run_kmeans(pixels, k, seed, tol, max_iter, init=init, restarts=restarts).palette


def map_palette(p: Palette, model: ColorModel) -> MappedPalette:
    """Express a palette in model color ids.

    Centroids are rounded to integer channels and matched by CIEDE2000;
    entries that land on the same id merge by summing weights. Result is
    sorted by descending weight, ties to the lowest id.
    """
    merged: dict[int, list[float]] = {}
    for entry in p.entries:
        rgb = RgbColor(*(min(255, max(0, round(c))) for c in entry.centroid))
        cid = nearest_model_color(rgb, model)
        merged.setdefault(cid, []).append(entry.weight)
    entries = [
        MappedEntry(color_id=cid, weight=math.fsum(ws)) for cid, ws in merged.items()
    ]
    entries.sort(key=lambda e: (-e.weight, e.color_id))
    return MappedPalette(entries=entries)
