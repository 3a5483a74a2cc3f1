"""Pixel loading, k-means clustering, and palette mapping."""

import itertools
import math

import numpy as np
import pytest

from chromasent.colors import default_color_model
from chromasent.errors import EmptyImageError, InputError
from chromasent.palette import (
    MappedEntry,
    Palette,
    PaletteEntry,
    PixelSet,
    kmeans_cluster,
    kmeans_init,
    load_pixels,
    map_palette,
    run_kmeans,
)

from conftest import png_bytes, solid_png


def pixel_set(rows) -> PixelSet:
    arr = np.asarray(rows, dtype=np.uint8)
    return PixelSet(pixels=arr, width=len(arr), height=1)


def brute_force_wcss(points: np.ndarray, k: int) -> float:
    """Exhaustive optimum of the within-cluster sum of squares over every
    assignment of the points into at most k clusters."""
    n = len(points)
    best = math.inf
    for assignment in itertools.product(range(k), repeat=n):
        total = 0.0
        for j in range(k):
            members = points[[i for i in range(n) if assignment[i] == j]]
            if len(members):
                total += float(((members - members.mean(axis=0)) ** 2).sum())
        best = min(best, total)
    return best


class TestLoadPixels:
    def test_opaque_red_square(self):
        px = load_pixels(solid_png(10, 10, (255, 0, 0)))
        assert len(px) == 100
        assert (px.pixels == (255, 0, 0)).all()

    def test_transparent_pixels_dropped(self):
        arr = np.zeros((10, 10, 4), dtype=np.uint8)
        arr[..., 0] = 255
        arr[..., 3] = 255
        arr[:4, :, 3] = 0  # 40 fully transparent pixels
        px = load_pixels(png_bytes(arr))
        assert len(px) == 60

    def test_alpha_threshold(self):
        arr = np.zeros((1, 2, 4), dtype=np.uint8)
        arr[..., 3] = (5, 200)
        assert len(load_pixels(png_bytes(arr), alpha_threshold=8)) == 1
        assert len(load_pixels(png_bytes(arr), alpha_threshold=1)) == 2

    def test_downscale_proportional(self):
        arr = np.zeros((512, 1024, 3), dtype=np.uint8)
        px = load_pixels(png_bytes(arr), max_dimension=256)
        assert (px.width, px.height) == (256, 128)
        assert len(px) == 256 * 128

    def test_small_image_not_upscaled(self):
        px = load_pixels(solid_png(10, 4, (1, 2, 3)), max_dimension=256)
        assert (px.width, px.height) == (10, 4)

    def test_undecodable_rejected(self):
        with pytest.raises(InputError):
            load_pixels(b"definitely not an image")

    def test_all_transparent_rejected(self):
        arr = np.zeros((4, 4, 4), dtype=np.uint8)
        with pytest.raises(EmptyImageError):
            load_pixels(png_bytes(arr))

    def test_background_removal(self):
        # white canvas with a red block; border color (white) is dropped
        arr = np.full((10, 10, 3), 255, dtype=np.uint8)
        arr[3:7, 3:7] = (255, 0, 0)
        px = load_pixels(png_bytes(arr), drop_background=True)
        assert len(px) == 16
        assert (px.pixels == (255, 0, 0)).all()

    def test_background_removal_catches_near_colors(self):
        arr = np.full((10, 10, 3), 255, dtype=np.uint8)
        arr[3:7, 3:7] = (255, 0, 0)
        arr[0, 0] = (254, 254, 254)  # visually identical to the background
        px = load_pixels(png_bytes(arr), drop_background=True)
        assert len(px) == 16


class TestKmeansInit:
    def test_single_color_reduces_k(self):
        px = pixel_set([(9, 9, 9)] * 20)
        centroids = kmeans_init(px, 5, seed=0)
        assert centroids.shape == (1, 3)
        assert (centroids[0] == (9, 9, 9)).all()

    def test_deterministic_for_seed(self):
        rng = np.random.default_rng(3)
        px = PixelSet(pixels=rng.integers(0, 256, (100, 3)), width=10, height=10)
        a = kmeans_init(px, 4, seed=7)
        b = kmeans_init(px, 4, seed=7)
        assert (a == b).all()

    def test_weighted_seeding_hits_both_colors(self):
        # second pick has zero probability of repeating the first color
        px = pixel_set([(0, 0, 0)] * 30 + [(255, 255, 255)] * 10)
        for seed in range(25):
            centroids = kmeans_init(px, 2, seed=seed, method="weighted")
            assert {tuple(c) for c in centroids} == {(0.0, 0.0, 0.0), (255.0, 255.0, 255.0)}

    def test_uniform_mode(self):
        px = pixel_set([(i, 0, 0) for i in range(50)])
        a = kmeans_init(px, 3, seed=5, method="uniform")
        b = kmeans_init(px, 3, seed=5, method="uniform")
        assert (a == b).all()

    def test_bad_arguments(self):
        px = pixel_set([(0, 0, 0)])
        with pytest.raises(InputError):
            kmeans_init(px, 0, seed=1)
        with pytest.raises(InputError):
            kmeans_init(px, 1, seed=1, method="nope")


class TestKmeansCluster:
    def test_single_cluster_of_identical_pixels(self):
        px = pixel_set([(255, 0, 0)] * 100)
        palette = kmeans_cluster(px, 1, seed=42)
        assert len(palette.entries) == 1
        assert palette.entries[0].centroid == (255.0, 0.0, 0.0)
        assert palette.entries[0].weight == 1.0

    def test_exact_recovery_of_two_point_masses(self):
        px = pixel_set([(255, 0, 0)] * 60 + [(0, 0, 255)] * 40)
        palette = kmeans_cluster(px, 2, seed=42)
        by_centroid = {e.centroid: e.weight for e in palette.entries}
        assert by_centroid == {(255.0, 0.0, 0.0): 0.6, (0.0, 0.0, 255.0): 0.4}

    def test_objective_monotone_and_fixed_point(self):
        rng = np.random.default_rng(0)
        blob_a = rng.normal((40, 40, 40), 6, (60, 3))
        blob_b = rng.normal((200, 180, 40), 6, (40, 3))
        pts = np.clip(np.concatenate([blob_a, blob_b]), 0, 255).astype(np.uint8)
        px = PixelSet(pixels=pts, width=10, height=10)
        res = run_kmeans(px, 3, seed=9)

        for earlier, later in zip(res.objectives, res.objectives[1:]):
            assert later <= earlier + 1e-9

        # fixed point: each pixel sits with its nearest centroid, and each
        # centroid is the mean of its pixels
        centroids = np.array([e.centroid for e in res.palette.entries])
        data = px.pixels.astype(float)
        d2 = ((data[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        for j in range(len(centroids)):
            members = data[labels == j]
            assert len(members)
            assert np.abs(members.mean(axis=0) - centroids[j]).max() < 1e-6

    def test_bit_identical_determinism(self):
        rng = np.random.default_rng(5)
        px = PixelSet(pixels=rng.integers(0, 256, (300, 3)), width=20, height=15)
        a = kmeans_cluster(px, 4, seed=123)
        b = kmeans_cluster(px, 4, seed=123)
        assert a.entries == b.entries

    def test_pixel_order_invariance_of_objective(self):
        rng = np.random.default_rng(8)
        blob_a = rng.normal((30, 30, 30), 3, (50, 3))
        blob_b = rng.normal((220, 220, 220), 3, (50, 3))
        pts = np.clip(np.concatenate([blob_a, blob_b]), 0, 255).astype(np.uint8)
        shuffled = pts[rng.permutation(len(pts))]
        res_a = run_kmeans(PixelSet(pts, 10, 10), 2, seed=1)
        res_b = run_kmeans(PixelSet(shuffled, 10, 10), 2, seed=1)
        assert abs(res_a.objective - res_b.objective) < 1e-6

    def test_weights_sum_to_one(self):
        rng = np.random.default_rng(17)
        px = PixelSet(pixels=rng.integers(0, 256, (257, 3)), width=257, height=1)
        palette = kmeans_cluster(px, 5, seed=3)
        assert abs(math.fsum(e.weight for e in palette.entries) - 1.0) < 1e-9

    def test_empty_cluster_reseeded(self):
        # uniform init on a lopsided population often seeds duplicate values;
        # the reseed rule must still produce k populated clusters
        px = pixel_set([(0, 0, 0)] * 98 + [(80, 80, 80)] * 1 + [(255, 255, 255)] * 1)
        for seed in range(10):
            palette = kmeans_cluster(px, 3, seed=seed, init="uniform")
            assert len(palette.entries) == 3
            assert all(e.weight > 0 for e in palette.entries)

    def test_best_of_restarts_matches_brute_force(self):
        pts = np.array(
            [
                (0, 0, 0), (4, 0, 0), (0, 5, 0),
                (120, 130, 125), (124, 128, 119),
                (250, 245, 255), (255, 250, 250), (247, 252, 248),
            ],
            dtype=np.uint8,
        )
        px = PixelSet(pixels=pts, width=8, height=1)
        optimal = brute_force_wcss(pts.astype(float), 3)
        res = run_kmeans(px, 3, seed=42, restarts=16)
        assert abs(res.objective - optimal) < 1e-9

    def test_invalid_parameters(self):
        px = pixel_set([(0, 0, 0), (1, 1, 1)])
        with pytest.raises(InputError):
            kmeans_cluster(px, 1, tol=0.0)
        with pytest.raises(InputError):
            kmeans_cluster(px, 1, max_iter=0)
        with pytest.raises(InputError):
            kmeans_cluster(px, 1, restarts=0)


class TestPaletteTypes:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(InputError):
            Palette(entries=[PaletteEntry((0.0, 0.0, 0.0), 0.5)])

    def test_centroid_range_checked(self):
        with pytest.raises(InputError):
            Palette(entries=[PaletteEntry((0.0, 0.0, 300.0), 1.0)])

    def test_mapped_ids_unique(self):
        with pytest.raises(InputError):
            from chromasent.palette import MappedPalette

            MappedPalette(entries=[MappedEntry(1, 0.5), MappedEntry(1, 0.5)])


class TestMapPalette:
    def test_exact_color_maps_to_its_id(self):
        palette = Palette(entries=[PaletteEntry((255.0, 0.0, 0.0), 1.0)])
        mapped = map_palette(palette, default_color_model())
        assert [(e.color_id, e.weight) for e in mapped.entries] == [(2, 1.0)]

    def test_nearby_centroids_merge(self):
        palette = Palette(
            entries=[
                PaletteEntry((255.0, 0.0, 0.0), 0.5),
                PaletteEntry((254.0, 1.0, 1.0), 0.5),
            ]
        )
        mapped = map_palette(palette, default_color_model())
        assert [(e.color_id, e.weight) for e in mapped.entries] == [(2, 1.0)]

    def test_sorted_by_weight_then_id(self):
        palette = Palette(
            entries=[
                PaletteEntry((0.0, 0.0, 0.0), 0.25),       # id 0
                PaletteEntry((192.0, 192.0, 192.0), 0.25),  # id 14
                PaletteEntry((255.0, 0.0, 0.0), 0.5),       # id 2
            ]
        )
        mapped = map_palette(palette, default_color_model())
        assert [e.color_id for e in mapped.entries] == [2, 0, 14]

    def test_rounding_before_mapping(self):
        palette = Palette(entries=[PaletteEntry((254.6, 0.4, 0.2), 1.0)])
        mapped = map_palette(palette, default_color_model())
        assert mapped.entries[0].color_id == 2
