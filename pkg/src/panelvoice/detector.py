"""Stage 1: locate panel boards by color and extract text-line regions.

The pipeline is classical: HSV board mask -> dilate -> connected components
for the board, then per-board Otsu binarization (both polarities, keeping
whichever yields more plausible glyph components), geometric filtering, and
transitive line grouping. Everything is pure and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .geometry import Box
from .raster import (
    Channels,
    Component,
    Polarity,
    RasterImage,
    binarize,
    connected_components,
    dilate,
    otsu_threshold,
    to_grayscale,
)


@dataclass(frozen=True)
class DetectorConfig:
    """Geometry and color bounds; defaults are tuned on the synthetic corpus.

    hue_ranges are degrees, well-ordered (lo <= hi, no wraparound): the
    defaults cover the green/blue/yellow boards typical of Indian highways.
    Area fractions are relative to the panel crop; aspect is h/w.
    """

    hue_ranges: tuple[tuple[float, float], ...] = ((90.0, 150.0), (200.0, 250.0), (40.0, 65.0))
    min_saturation: float = 0.25
    panel_dilate: int = 5
    min_panel_area_frac: float = 0.01
    min_area_frac: float = 0.0001
    max_area_frac: float = 0.20
    min_aspect: float = 0.3
    max_aspect: float = 12.0
    min_fill: float = 0.10
    max_fill: float = 0.95
    vertical_overlap: float = 0.5  # share-a-line threshold on min height
    gap_factor: float = 2.5  # max horizontal gap, in median heights

    def __post_init__(self):
        for lo, hi in self.hue_ranges:
            if lo > hi:
                raise ConfigError(f"hue range ({lo}, {hi}) not well-ordered")
        for lo, hi, name in (
            (self.min_area_frac, self.max_area_frac, "area_frac"),
            (self.min_aspect, self.max_aspect, "aspect"),
            (self.min_fill, self.max_fill, "fill"),
        ):
            if lo > hi:
                raise ConfigError(f"{name} bounds ({lo}, {hi}) not well-ordered")
        if self.panel_dilate < 1 or self.panel_dilate % 2 == 0:
            raise ConfigError("panel_dilate must be odd")

    def to_dict(self) -> dict:
        return {
            "hue_ranges": [list(r) for r in self.hue_ranges],
            "min_saturation": self.min_saturation,
            "panel_dilate": self.panel_dilate,
            "min_panel_area_frac": self.min_panel_area_frac,
            "min_area_frac": self.min_area_frac,
            "max_area_frac": self.max_area_frac,
            "min_aspect": self.min_aspect,
            "max_aspect": self.max_aspect,
            "min_fill": self.min_fill,
            "max_fill": self.max_fill,
            "vertical_overlap": self.vertical_overlap,
            "gap_factor": self.gap_factor,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DetectorConfig":
        kwargs = dict(data)
        if "hue_ranges" in kwargs:
            kwargs["hue_ranges"] = tuple((float(lo), float(hi)) for lo, hi in kwargs["hue_ranges"])
        unknown = set(kwargs) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown detector config fields: {sorted(unknown)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class TextRegion:
    """One detected text line: tight box over left-to-right component boxes."""

    box: Box
    line_index: int
    component_boxes: tuple[Box, ...]
    score: float


def _hue_saturation(px: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hue in degrees [0, 360) and saturation in [0, 1] per pixel."""
    rgb = px.astype(np.float64) / 255.0
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    v = rgb.max(axis=2)
    c = v - rgb.min(axis=2)
    safe_c = np.where(c == 0, 1.0, c)
    hue = np.zeros_like(v)
    idx = (v == r) & (c > 0)
    hue[idx] = (60.0 * ((g - b) / safe_c))[idx] % 360.0
    idx = (v == g) & (c > 0) & (v != r)
    hue[idx] = (60.0 * (2.0 + (b - r) / safe_c))[idx]
    idx = (v == b) & (c > 0) & (v != r) & (v != g)
    hue[idx] = (60.0 * (4.0 + (r - g) / safe_c))[idx]
    hue = hue % 360.0
    sat = np.where(v == 0, 0.0, c / np.where(v == 0, 1.0, v))
    return hue, sat


def segment_panel(img: RasterImage, cfg: DetectorConfig = DetectorConfig()) -> list[Box]:
    """Candidate board boxes, largest first; empty when no hue mass matches."""
    if img.channels is not Channels.RGB8:
        raise ValueError("segment_panel expects an RGB8 image")
    hue, sat = _hue_saturation(img.pixels)
    mask = np.zeros(hue.shape, dtype=bool)
    for lo, hi in cfg.hue_ranges:
        mask |= (hue >= lo) & (hue <= hi)
    mask &= sat >= cfg.min_saturation
    board = RasterImage(mask.astype(np.uint8) * 255)
    board = dilate(board, cfg.panel_dilate)
    comps = connected_components(board, 8)
    min_area = cfg.min_panel_area_frac * img.width * img.height
    keep = [c for c in comps if c.area >= min_area]
    keep.sort(key=lambda c: (-c.area, c.box.y, c.box.x))
    return [c.box for c in keep]


def _passes_filters(comp: Component, panel_area: int, cfg: DetectorConfig) -> bool:
    frac = comp.area / panel_area
    if not (cfg.min_area_frac <= frac <= cfg.max_area_frac):
        return False
    aspect = comp.box.h / comp.box.w
    if not (cfg.min_aspect <= aspect <= cfg.max_aspect):
        return False
    fill = comp.area / comp.box.area
    return cfg.min_fill <= fill <= cfg.max_fill


def _candidate_set(panel: RasterImage, t: int, polarity: Polarity, cfg: DetectorConfig) -> list[Component]:
    comps = connected_components(binarize(panel, t, polarity), 8)
    panel_area = panel.width * panel.height
    # Components enclosed by an oversized blob of the same polarity are its
    # counters (letter holes of inverted content), not text: skip them so a
    # wrongly-inverted board cannot outvote the real glyphs.
    oversized = [c for c in comps if c.area / panel_area > cfg.max_area_frac]

    def enclosed(c: Component) -> bool:
        return any(
            o is not c
            and o.box.x <= c.box.x
            and o.box.y <= c.box.y
            and o.box.x2 >= c.box.x2
            and o.box.y2 >= c.box.y2
            for o in oversized
        )

    return [c for c in comps if _passes_filters(c, panel_area, cfg) and not enclosed(c)]


def extract_candidates(panel: RasterImage, cfg: DetectorConfig = DetectorConfig()) -> list[Component]:
    """Glyph-sized components of the panel crop.

    Binarizes at the Otsu threshold under both polarities and keeps the
    polarity that yields more components passing the geometric filters
    (ties prefer light-on-dark, the common Indian board contrast).
    """
    if panel.channels is not Channels.GRAY8:
        raise ValueError("extract_candidates expects a Gray8 panel crop")
    t = otsu_threshold(panel)
    light = _candidate_set(panel, t, Polarity.LIGHT_FG, cfg)
    dark = _candidate_set(panel, t, Polarity.DARK_FG, cfg)
    return dark if len(dark) > len(light) else light


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[rj] = ri


def _share_line(a: Box, b: Box, median_height: float, cfg: DetectorConfig) -> bool:
    overlap = min(a.y2, b.y2) - max(a.y, b.y)
    if overlap < cfg.vertical_overlap * min(a.h, b.h):
        return False
    gap = max(a.x, b.x) - min(a.x2, b.x2)
    return gap <= cfg.gap_factor * median_height


def group_into_lines(candidates: list[Component], cfg: DetectorConfig = DetectorConfig()) -> list[TextRegion]:
    """Cluster candidates into text lines; membership is the transitive
    closure of the pairwise rule, output is top-to-bottom with consecutive
    line_index from 0."""
    if not candidates:
        return []
    heights = [c.box.h for c in candidates]
    median_height = float(np.median(heights))
    uf = _UnionFind(len(candidates))
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            if _share_line(candidates[i].box, candidates[j].box, median_height, cfg):
                uf.union(i, j)
    groups: dict[int, list[Component]] = {}
    for i, comp in enumerate(candidates):
        groups.setdefault(uf.find(i), []).append(comp)

    regions = []
    for members in groups.values():
        boxes = sorted((m.box for m in members), key=lambda b: (b.x, b.y))
        union = Box.union_of(boxes)
        ink = sum(m.area for m in members)
        score = min(1.0, max(0.0, ink / union.area))
        regions.append((union, tuple(boxes), score))
    regions.sort(key=lambda r: (r[0].y, r[0].x))
    return [
        TextRegion(box=box, line_index=i, component_boxes=comp_boxes, score=score)
        for i, (box, comp_boxes, score) in enumerate(regions)
    ]


def detect_text_regions(img: RasterImage, cfg: DetectorConfig = DetectorConfig()) -> list[TextRegion]:
    """Full stage-1 composition, with boxes in full-image coordinates.

    When no board is found the whole frame is treated as the panel.
    """
    panels = segment_panel(img, cfg)
    if not panels:
        panels = [Box(0, 0, img.width, img.height)]
    collected = []
    for panel_box in panels:
        crop = img.crop(panel_box)
        gray = to_grayscale(crop) if crop.channels is Channels.RGB8 else crop
        candidates = extract_candidates(gray, cfg)
        for region in group_into_lines(candidates, cfg):
            collected.append(
                (
                    region.box.translate(panel_box.x, panel_box.y),
                    tuple(b.translate(panel_box.x, panel_box.y) for b in region.component_boxes),
                    region.score,
                )
            )
    collected.sort(key=lambda r: (r[0].y, r[0].x))
    return [
        TextRegion(box=box, line_index=i, component_boxes=comp_boxes, score=score)
        for i, (box, comp_boxes, score) in enumerate(collected)
    ]
