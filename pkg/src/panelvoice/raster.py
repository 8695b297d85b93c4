"""Image substrate and the classical per-pixel primitives used by detection.

All operations are pure: inputs are immutable (pixel buffers are locked
against writes) and every op returns a fresh image, so batch callers may
parallelize per image with no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import ImageDecodeError
from .geometry import Box


class Channels(Enum):
    GRAY8 = 1
    RGB8 = 3


class Polarity(Enum):
    DARK_FG = "dark_fg"
    LIGHT_FG = "light_fg"


# BT.601 luma weights, scaled to integers so grayscale conversion is exact.
_LUMA_R, _LUMA_G, _LUMA_B = 299, 587, 114


@dataclass(frozen=True)
class RasterImage:
    """Owned row-major pixel grid, either Gray8 (h, w) or RGB8 (h, w, 3)."""

    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        px = np.ascontiguousarray(self.pixels, dtype=np.uint8).copy()
        if px.ndim == 2:
            pass
        elif px.ndim == 3 and px.shape[2] == 3:
            pass
        else:
            raise ValueError(f"expected (h, w) or (h, w, 3) uint8 array, got shape {self.pixels.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> Channels:
        return Channels.GRAY8 if self.pixels.ndim == 2 else Channels.RGB8

    @property
    def data(self) -> bytes:
        """Row-major byte buffer of length width*height*channels."""
        return self.pixels.tobytes()

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: Channels, data: bytes) -> "RasterImage":
        expected = width * height * channels.value
        if len(data) != expected:
            raise ValueError(f"buffer length {len(data)} != {expected}")
        shape = (height, width) if channels is Channels.GRAY8 else (height, width, 3)
        return cls(np.frombuffer(data, dtype=np.uint8).reshape(shape))

    def crop(self, box: Box) -> "RasterImage":
        if not box.inside(self.width, self.height):
            raise ValueError(f"crop box {box} outside {self.width}x{self.height} image")
        return RasterImage(self.pixels[box.y:box.y2, box.x:box.x2])


@dataclass(frozen=True)
class Component:
    """One connected blob of foreground pixels."""

    label: int
    box: Box
    area: int
    centroid: tuple[float, float]  # (fx, fy)


def _require_gray(img: RasterImage, op: str) -> np.ndarray:
    if img.channels is not Channels.GRAY8:
        raise ValueError(f"{op} expects a Gray8 image")
    return img.pixels


def to_grayscale(img: RasterImage) -> RasterImage:
    """BT.601 luma, rounded half up. Exact integer arithmetic."""
    if img.channels is not Channels.RGB8:
        raise ValueError("to_grayscale expects an RGB8 image")
    px = img.pixels.astype(np.int32)
    luma = (_LUMA_R * px[:, :, 0] + _LUMA_G * px[:, :, 1] + _LUMA_B * px[:, :, 2] + 500) // 1000
    return RasterImage(luma.astype(np.uint8))


def otsu_threshold(img: RasterImage) -> int:
    """Threshold maximizing between-class variance; ties go to the smallest t.

    Splits at t into classes [0..t] and (t..255]. Comparisons use exact
    integer arithmetic, so the result matches an exhaustive rational scan
    bit for bit. A single-valued histogram returns that value.
    """
    px = _require_gray(img, "otsu_threshold")
    hist = np.bincount(px.ravel(), minlength=256)
    counts = [int(c) for c in hist]
    total = sum(counts)
    weighted_total = sum(i * c for i, c in enumerate(counts))

    # Between-class variance at t is (s0*n1 - s1*n0)^2 / (N^2 * n0 * n1);
    # N^2 is constant, so compare (s0*n1 - s1*n0)^2 / (n0*n1) as fractions.
    best_t = None
    best_num = 0
    best_den = 1
    n0 = 0
    s0 = 0
    for t in range(256):
        n0 += counts[t]
        s0 += t * counts[t]
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        s1 = weighted_total - s0
        num = (s0 * n1 - s1 * n0) ** 2
        den = n0 * n1
        if best_t is None or num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    if best_t is None:
        # Degenerate: every pixel has the same value; return it.
        return int(np.argmax(hist))
    return best_t


def binarize(img: RasterImage, t: int, polarity: Polarity | str) -> RasterImage:
    """Map to {0, 255}: dark_fg keeps pixels <= t, light_fg keeps pixels > t."""
    px = _require_gray(img, "binarize")
    polarity = Polarity(polarity)
    if polarity is Polarity.DARK_FG:
        fg = px <= t
    else:
        fg = px > t
    return RasterImage(np.where(fg, 255, 0).astype(np.uint8))


def adaptive_threshold(img: RasterImage, window: int, bias: int) -> RasterImage:
    """Foreground where value < (local mean over window, edge-replicated) - bias.

    Implemented with an integer summed-area table over a replicated pad, so
    the mean comparison is exact: value < sum/k^2 - C  <=>  (value + C)*k^2 < sum.
    """
    px = _require_gray(img, "adaptive_threshold")
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be an odd int >= 3, got {window}")
    r = window // 2
    padded = np.pad(px.astype(np.int64), r, mode="edge")
    sat = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.int64)
    sat[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    k = window
    h, w = px.shape
    window_sum = (
        sat[k : k + h, k : k + w]
        - sat[0:h, k : k + w]
        - sat[k : k + h, 0:w]
        + sat[0:h, 0:w]
    )
    fg = (px.astype(np.int64) + bias) * (k * k) < window_sum
    return RasterImage(np.where(fg, 255, 0).astype(np.uint8))


_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)


def label_components(img: RasterImage, connectivity: int = 4) -> tuple[np.ndarray, list[Component]]:
    """Label map plus components; labels follow first-encounter raster order."""
    px = _require_gray(img, "connected_components")
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    structure = _STRUCTURE_4 if connectivity == 4 else _STRUCTURE_8
    labeled, n = ndimage.label(px > 0, structure=structure)
    if n == 0:
        return labeled, []

    # Canonicalize: renumber so label order equals raster-scan first encounter.
    flat = labeled.ravel()
    raw = flat[flat > 0]
    _, first_idx = np.unique(raw, return_index=True)
    order = raw[np.sort(first_idx)]
    remap = np.zeros(n + 1, dtype=np.int64)
    remap[order] = np.arange(1, n + 1)
    canonical = remap[labeled]

    comps = []
    objects = ndimage.find_objects(canonical)
    for i, sl in enumerate(objects, start=1):
        ys, xs = np.nonzero(canonical[sl] == i)
        y0, x0 = sl[0].start, sl[1].start
        area = int(len(xs))
        box = Box(
            x0 + int(xs.min()),
            y0 + int(ys.min()),
            int(xs.max() - xs.min()) + 1,
            int(ys.max() - ys.min()) + 1,
        )
        centroid = (x0 + float(xs.mean()), y0 + float(ys.mean()))
        comps.append(Component(label=i, box=box, area=area, centroid=centroid))
    return canonical, comps


def connected_components(img: RasterImage, connectivity: int = 4) -> list[Component]:
    """Foreground blobs in deterministic raster-scan label order."""
    return label_components(img, connectivity)[1]


def _morph(img: RasterImage, k: int, op) -> RasterImage:
    px = _require_gray(img, "morphology")
    if k < 1 or k % 2 == 0:
        raise ValueError(f"kernel size must be odd, got {k}")
    return RasterImage(op(px, size=k, mode="nearest"))


def dilate(img: RasterImage, k: int) -> RasterImage:
    """Max filter over a k x k window, edge-replicated."""
    return _morph(img, k, ndimage.maximum_filter)


def erode(img: RasterImage, k: int) -> RasterImage:
    """Min filter over a k x k window, edge-replicated."""
    return _morph(img, k, ndimage.minimum_filter)


def ensure_rgb(img: RasterImage) -> RasterImage:
    """Promote Gray8 to RGB8 by channel replication; RGB8 passes through."""
    if img.channels is Channels.RGB8:
        return img
    return RasterImage(np.repeat(img.pixels[:, :, None], 3, axis=2))


def load_image(path: str | Path) -> RasterImage:
    """Decode a PNG/JPEG into Gray8 (for grayscale files) or RGB8."""
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            if im.mode == "L":
                return RasterImage(np.asarray(im))
            return RasterImage(np.asarray(im.convert("RGB")))
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageDecodeError(f"cannot decode {path}: {exc}") from exc


def save_image(img: RasterImage, path: str | Path) -> None:
    from PIL import Image

    Image.fromarray(img.pixels).save(path)
