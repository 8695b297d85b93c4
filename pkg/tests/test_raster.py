import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from panelvoice.geometry import Box
from panelvoice.raster import (
    Channels,
    Polarity,
    RasterImage,
    adaptive_threshold,
    binarize,
    connected_components,
    dilate,
    erode,
    otsu_threshold,
    to_grayscale,
)

from oracles import local_mean_fg_oracle, luma_oracle, otsu_oracle


def gray(rows):
    return RasterImage(np.array(rows, dtype=np.uint8))


def rgb(value, h=2, w=2):
    return RasterImage(np.full((h, w, 3), value, dtype=np.uint8) * np.array(value if isinstance(value, tuple) else (1, 1, 1), dtype=np.uint8))


def solid_rgb(r, g, b, h=2, w=2):
    px = np.zeros((h, w, 3), dtype=np.uint8)
    px[:, :] = (r, g, b)
    return RasterImage(px)


class TestRasterImage:
    def test_byte_roundtrip(self):
        img = solid_rgb(10, 20, 30, h=3, w=4)
        again = RasterImage.from_bytes(img.width, img.height, img.channels, img.data)
        assert np.array_equal(again.pixels, img.pixels)
        assert len(img.data) == 3 * 4 * 3

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            RasterImage(np.zeros((0, 3), dtype=np.uint8))

    def test_buffer_is_immutable(self):
        img = gray([[1, 2], [3, 4]])
        with pytest.raises(ValueError):
            img.pixels[0, 0] = 9

    def test_crop_bounds(self):
        img = gray([[1, 2, 3], [4, 5, 6]])
        assert img.crop(Box(1, 0, 2, 2)).pixels.tolist() == [[2, 3], [5, 6]]
        with pytest.raises(ValueError):
            img.crop(Box(1, 1, 3, 1))


class TestGrayscale:
    def test_white_and_black(self):
        assert to_grayscale(solid_rgb(255, 255, 255)).pixels[0, 0] == 255
        assert to_grayscale(solid_rgb(0, 0, 0)).pixels[0, 0] == 0

    def test_pure_red_matches_hand_oracle(self):
        # round(0.299 * 255) = round(76.245)
        assert luma_oracle(255, 0, 0) == 76
        assert to_grayscale(solid_rgb(255, 0, 0)).pixels[0, 0] == 76

    def test_matches_oracle_on_random_pixels(self):
        rng = np.random.default_rng(7)
        px = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
        out = to_grayscale(RasterImage(px))
        for y in range(16):
            for x in range(16):
                r, g, b = (int(v) for v in px[y, x])
                assert out.pixels[y, x] == luma_oracle(r, g, b)

    def test_rejects_gray_input(self):
        with pytest.raises(ValueError):
            to_grayscale(gray([[0]]))


class TestOtsu:
    def test_uniform_returns_value(self):
        assert otsu_threshold(gray([[128, 128], [128, 128]])) == 128

    def test_two_level_smallest_maximizer(self):
        values = [0, 0, 0, 255, 255]
        assert otsu_oracle(values) == 0
        assert otsu_threshold(gray([values])) == 0

    def test_matches_bruteforce_on_random_images(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            h, w = int(rng.integers(1, 17)), int(rng.integers(1, 17))
            px = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
            img = RasterImage(px)
            assert otsu_threshold(img) == otsu_oracle([int(v) for v in px.ravel()])

    def test_low_contrast_matches_oracle(self):
        rng = np.random.default_rng(3)
        px = rng.integers(100, 104, size=(8, 8), dtype=np.uint8)
        img = RasterImage(px)
        assert otsu_threshold(img) == otsu_oracle([int(v) for v in px.ravel()])


class TestBinarize:
    def test_all_zero_dark_fg(self):
        out = binarize(gray([[0, 0], [0, 0]]), 0, Polarity.DARK_FG)
        assert (out.pixels == 255).all()

    def test_checker_light_fg(self):
        out = binarize(gray([[0, 255], [255, 0]]), 128, "light_fg")
        assert out.pixels.tolist() == [[0, 255], [255, 0]]

    def test_polarities_are_complementary(self):
        rng = np.random.default_rng(5)
        px = rng.integers(0, 256, size=(9, 9), dtype=np.uint8)
        img = RasterImage(px)
        t = int(rng.integers(0, 256))
        dark = binarize(img, t, Polarity.DARK_FG).pixels
        light = binarize(img, t, Polarity.LIGHT_FG).pixels
        assert ((dark ^ light) == 255).all()

    def test_output_values_binary(self):
        rng = np.random.default_rng(6)
        px = rng.integers(0, 256, size=(7, 5), dtype=np.uint8)
        out = binarize(RasterImage(px), 77, Polarity.LIGHT_FG)
        assert set(np.unique(out.pixels)) <= {0, 255}


class TestAdaptiveThreshold:
    def test_uniform_positive_bias_all_background(self):
        out = adaptive_threshold(gray([[90] * 6] * 6), 3, 1)
        assert (out.pixels == 0).all()

    def test_uniform_negative_bias_all_foreground(self):
        out = adaptive_threshold(gray([[90] * 6] * 6), 3, -1)
        assert (out.pixels == 255).all()

    def test_dark_blob_on_bright_field(self):
        px = np.full((24, 24), 200, dtype=np.uint8)
        px[10:13, 10:13] = 20
        out = adaptive_threshold(RasterImage(px), 15, 10)
        expected = local_mean_fg_oracle(px.tolist(), 15, 10)
        for y in range(24):
            for x in range(24):
                assert bool(out.pixels[y, x] == 255) == expected[y][x]
        assert (out.pixels[10:13, 10:13] == 255).all()

    def test_matches_oracle_on_random_image(self):
        rng = np.random.default_rng(11)
        px = rng.integers(0, 256, size=(12, 10), dtype=np.uint8)
        for window, bias in [(3, 0), (5, 4), (7, -3)]:
            out = adaptive_threshold(RasterImage(px), window, bias)
            expected = local_mean_fg_oracle(px.tolist(), window, bias)
            for y in range(12):
                for x in range(10):
                    assert bool(out.pixels[y, x] == 255) == expected[y][x], (y, x, window, bias)

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            adaptive_threshold(gray([[1]]), 4, 0)


def binary_from(rows):
    return RasterImage(np.array(rows, dtype=np.uint8) * 255)


class TestConnectedComponents:
    def test_two_blobs_4conn(self):
        img = binary_from([[1, 1, 0], [0, 0, 0], [0, 1, 1]])
        comps = connected_components(img, 4)
        assert [c.area for c in comps] == [2, 2]
        assert [c.label for c in comps] == [1, 2]
        assert comps[0].box == Box(0, 0, 2, 1)
        assert comps[1].box == Box(1, 2, 2, 1)

    def test_two_blobs_8conn_same(self):
        img = binary_from([[1, 1, 0], [0, 0, 0], [0, 1, 1]])
        assert len(connected_components(img, 8)) == 2

    def test_diagonal_pair(self):
        img = binary_from([[1, 0], [0, 1]])
        assert len(connected_components(img, 4)) == 2
        assert len(connected_components(img, 8)) == 1

    def test_labels_follow_raster_order(self):
        img = binary_from([[0, 0, 1], [1, 0, 1], [1, 0, 0]])
        comps = connected_components(img, 4)
        # First encountered: the top-right blob, then bottom-left.
        assert comps[0].box.x == 2
        assert comps[1].box.x == 0

    def test_centroid_inside_box(self):
        rng = np.random.default_rng(13)
        img = RasterImage((rng.random((20, 20)) < 0.4).astype(np.uint8) * 255)
        for conn in (4, 8):
            for c in connected_components(img, conn):
                assert c.box.contains_point(*c.centroid)
                assert 1 <= c.area <= c.box.area

    def test_partition_property_random(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            h, w = int(rng.integers(1, 33)), int(rng.integers(1, 33))
            px = (rng.random((h, w)) < 0.45).astype(np.uint8) * 255
            img = RasterImage(px)
            fg_count = int((px > 0).sum())
            for conn in (4, 8):
                comps = connected_components(img, conn)
                assert sum(c.area for c in comps) == fg_count

    def test_empty_image(self):
        assert connected_components(binary_from([[0, 0], [0, 0]]), 4) == []


class TestMorphology:
    def test_dilate_point_to_block(self):
        px = np.zeros((5, 5), dtype=np.uint8)
        px[2, 2] = 255
        out = dilate(RasterImage(px), 3)
        assert (out.pixels[1:4, 1:4] == 255).all()
        assert out.pixels.sum() == 255 * 9

    def test_erode_block_to_point(self):
        px = np.zeros((5, 5), dtype=np.uint8)
        px[1:4, 1:4] = 255
        out = erode(RasterImage(px), 3)
        assert out.pixels[2, 2] == 255
        assert out.pixels.sum() == 255

    def test_closing_superset(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            px = (rng.random((12, 12)) < 0.3).astype(np.uint8) * 255
            img = RasterImage(px)
            closed = erode(dilate(img, 3), 3)
            assert (closed.pixels >= px).all()

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_dilate_monotone(self, seed):
        rng = np.random.default_rng(seed)
        a = (rng.random((10, 10)) < 0.3).astype(np.uint8) * 255
        b = np.maximum(a, (rng.random((10, 10)) < 0.2).astype(np.uint8) * 255)
        da = dilate(RasterImage(a), 3).pixels
        db = dilate(RasterImage(b), 3).pixels
        assert (da <= db).all()

    def test_even_kernel_rejected(self):
        with pytest.raises(ValueError):
            dilate(binary_from([[1]]), 2)


def test_channels_enum_values():
    assert Channels.GRAY8.value == 1
    assert Channels.RGB8.value == 3
