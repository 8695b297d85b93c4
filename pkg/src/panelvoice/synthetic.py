"""Deterministic synthetic panel corpus: rendered stand-in for field imagery.

Each panel is atlas-rendered text on a colored board over a gray surround,
with exact per-line ground-truth boxes. Noise (when requested) flips pixels
between text and board color inside the ground-truth line boxes only, which
corrupts the rendered text the way the recognizer's noise harness expects
without inventing clutter outside the annotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .atlas import GlyphAtlas, default_atlas
from .corpus import Corpus, GroundTruthRegion, PanelRecord, Source, save_manifest
from .geometry import Box
from .raster import RasterImage, save_image
from .scripts import Direction, Language, ScriptTag

TEXT_RGB = (245, 245, 245)
SURROUND_RGB = (120, 120, 120)

# One board color per language keeps all three default hue ranges exercised.
BOARD_RGB = {
    Language.ENGLISH: (30, 130, 60),  # green, hue ~138
    Language.HINDI: (25, 60, 160),  # blue, hue ~224
    Language.ASSAMESE: (200, 170, 30),  # yellow, hue ~49
}

LANGUAGE_SCRIPT = {
    Language.ENGLISH: ScriptTag.LATIN,
    Language.HINDI: ScriptTag.DEVANAGARI,
    Language.ASSAMESE: ScriptTag.BENGALI_ASSAMESE,
}

# (key, category, language, lines, direction annotation)
PANEL_DEFINITIONS = [
    ("c1-en", 1, Language.ENGLISH, ["GUWAHATI 25 KM"], None),
    ("c2-en", 2, Language.ENGLISH, ["AIRPORT"], Direction.LEFT),
    ("c3-en", 3, Language.ENGLISH, ["KAZIRANGA"], None),
    ("c4-en", 4, Language.ENGLISH, ["DRIVE SLOW"], None),
    ("c1-hi", 1, Language.HINDI, ["नगर 25 किमी"], None),
    ("c2-hi", 2, Language.HINDI, ["सदन"], Direction.RIGHT),
    ("c3-hi", 3, Language.HINDI, ["कमल"], None),
    ("c4-hi", 4, Language.HINDI, ["सावधान"], None),
    ("c1-as", 1, Language.ASSAMESE, ["নগর 25 কিমি"], None),
    ("c2-as", 2, Language.ASSAMESE, ["সদন"], Direction.STRAIGHT),
    ("c3-as", 3, Language.ASSAMESE, ["কমল"], None),
    ("c4-as", 4, Language.ASSAMESE, ["সাবধান"], None),
]


@dataclass(frozen=True)
class SyntheticPanel:
    """One rendered panel plus everything its annotations need."""

    key: str
    category: int
    language: Language
    lines: tuple[str, ...]
    direction: Direction | None
    noise: float
    image: RasterImage
    board_box: Box
    line_boxes: tuple[Box, ...]


def render_panel(
    lines,
    language: Language,
    atlas: GlyphAtlas | None = None,
    scale: int = 4,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
    board_margin: tuple[int, int] = (4, 3),
    line_gap: int = 3,
    surround: tuple[int, int, int, int] = (6, 6, 6, 6),
) -> SyntheticPanel:
    """Render text lines onto a board; margins/gaps are in glyph-cell units."""
    atlas = atlas or default_atlas()
    if noise and rng is None:
        raise ValueError("noisy renders need an explicit rng for determinism")

    masks = []
    for line in lines:
        mask, _ = atlas.render_string(line, scale=scale)
        masks.append(mask)
    mx = board_margin[0] * scale
    my = board_margin[1] * scale
    gap = line_gap * scale
    board_w = max(m.shape[1] for m in masks) + 2 * mx
    board_h = sum(m.shape[0] for m in masks) + gap * (len(masks) - 1) + 2 * my

    ink = np.zeros((board_h, board_w), dtype=bool)
    line_boxes = []
    y = my
    for mask in masks:
        h, w = mask.shape
        ink[y : y + h, mx : mx + w] = mask
        ys, xs = np.nonzero(mask)
        line_boxes.append(
            Box(mx + int(xs.min()), y + int(ys.min()), int(xs.max() - xs.min()) + 1, int(ys.max() - ys.min()) + 1)
        )
        y += h + gap

    if noise > 0:
        for box in line_boxes:
            flips = rng.random((box.h, box.w)) < noise
            region = ink[box.y : box.y2, box.x : box.x2]
            ink[box.y : box.y2, box.x : box.x2] = region ^ flips

    board = np.empty((board_h, board_w, 3), dtype=np.uint8)
    board[:, :] = BOARD_RGB[language]
    board[ink] = TEXT_RGB

    left, top, right, bottom = (v * scale for v in surround)
    canvas = np.empty((board_h + top + bottom, board_w + left + right, 3), dtype=np.uint8)
    canvas[:, :] = SURROUND_RGB
    canvas[top : top + board_h, left : left + board_w] = board

    board_box = Box(left, top, board_w, board_h)
    offset_boxes = tuple(b.translate(left, top) for b in line_boxes)
    return SyntheticPanel(
        key="adhoc",
        category=0,
        language=language,
        lines=tuple(lines),
        direction=None,
        noise=noise,
        image=RasterImage(canvas),
        board_box=board_box,
        line_boxes=offset_boxes,
    )


def _make_record(panel: SyntheticPanel, record_id: str, image_rel: str, source: Source) -> PanelRecord:
    regions = []
    script = LANGUAGE_SCRIPT[panel.language]
    for i, (line, box) in enumerate(zip(panel.lines, panel.line_boxes)):
        regions.append(
            GroundTruthRegion(
                box=box,
                transcript=line,
                script=script,
                reading_order=i,
                direction=panel.direction if i == 0 else None,
            )
        )
    return PanelRecord(
        id=record_id,
        image_path=image_rel,
        category=panel.category,
        languages=frozenset({panel.language}),
        source=source,
        regions=tuple(regions),
    )


@dataclass(frozen=True)
class SyntheticCorpus:
    root: Path
    manifest_path: Path  # all noise levels
    mini_manifest_path: Path  # the 12 noise-free records
    corpus: Corpus
    mini_corpus: Corpus


def build_synthetic_corpus(
    root: str | Path,
    noise_levels: tuple[float, ...] = (0.0, 0.03),
    scale: int = 4,
    seed: int = 20180830,
    atlas: GlyphAtlas | None = None,
) -> SyntheticCorpus:
    """Render the full corpus (one panel per definition per noise level).

    Noise-free records rotate photograph/online sources; noisy ones are
    tagged video_frame. Everything is deterministic in the seed.
    """
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    atlas = atlas or default_atlas()

    all_records = []
    clean_records = []
    for level_idx, noise in enumerate(noise_levels):
        for def_idx, (key, category, language, lines, direction) in enumerate(PANEL_DEFINITIONS):
            rng = np.random.default_rng(seed + 1000 * level_idx + def_idx)
            panel = render_panel(lines, language, atlas=atlas, scale=scale, noise=noise, rng=rng)
            panel = SyntheticPanel(
                key=key,
                category=category,
                language=language,
                lines=panel.lines,
                direction=direction,
                noise=noise,
                image=panel.image,
                board_box=panel.board_box,
                line_boxes=panel.line_boxes,
            )
            prefix = "clean" if noise == 0 else f"n{level_idx}"
            record_id = f"{prefix}-{key}"
            image_rel = f"images/{record_id}.png"
            save_image(panel.image, root / image_rel)
            if noise == 0:
                source = Source.PHOTOGRAPH if def_idx % 2 == 0 else Source.ONLINE
            else:
                source = Source.VIDEO_FRAME
            record = _make_record(panel, record_id, image_rel, source)
            all_records.append(record)
            if noise == 0:
                clean_records.append(record)

    corpus = Corpus(records=tuple(all_records))
    mini = Corpus(records=tuple(clean_records))
    manifest_path = root / "manifest.json"
    mini_manifest_path = root / "mini_manifest.json"
    save_manifest(corpus, manifest_path)
    save_manifest(mini, mini_manifest_path)
    return SyntheticCorpus(
        root=root,
        manifest_path=manifest_path,
        mini_manifest_path=mini_manifest_path,
        corpus=corpus,
        mini_corpus=mini,
    )
