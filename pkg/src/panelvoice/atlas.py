"""Bitmap glyph atlas: the deterministic recognizer's font and render oracle.

Atlas file format (plain text, UTF-8)::

    atlas v1 <H> <W>
    U+0041
    .###.
    #...#
    ...          (H rows of '.'/'#', W columns each)

One glyph per block; blank lines between blocks are ignored. Matching and
rendering both operate on tight crops rescaled with the same floor
nearest-neighbor map, so a string rendered at any integer scale recognizes
back to itself exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .geometry import Box
from .scripts import ScriptTag, identify_script


def scale_nearest(src: np.ndarray, dh: int, dw: int) -> np.ndarray:
    """Nearest-neighbor resample with the floor index map (i*sh)//dh."""
    sh, sw = src.shape
    rows = (np.arange(dh) * sh) // dh
    cols = (np.arange(dw) * sw) // dw
    return src[rows[:, None], cols[None, :]]


def resample_binary(src: np.ndarray, dh: int, dw: int) -> np.ndarray:
    """Area-weighted binary resample: each target cell is the majority vote
    of its exact (fractional) source block, ties counting as ink.

    Scale-invariant in exact arithmetic: resampling x and any integer
    upscale of x gives identical output, so atlas-rendered glyphs normalize
    back to their stored bitmaps; unlike point sampling it also tolerates
    the one-pixel box jitter that noise specks cause.
    """
    sh, sw = src.shape
    rep = np.repeat(np.repeat(src.astype(np.int32), dh, axis=0), dw, axis=1)
    sums = rep.reshape(dh, sh, dw, sw).sum(axis=(1, 3))
    return 2 * sums >= sh * sw


def tight_crop(bitmap: np.ndarray) -> np.ndarray:
    """Smallest sub-array containing all set pixels; empty input is an error."""
    ys, xs = np.nonzero(bitmap)
    if len(ys) == 0:
        raise ValueError("glyph bitmap has no ink")
    return bitmap[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]


@dataclass(frozen=True)
class Glyph:
    codepoint: int
    bitmap: np.ndarray  # full (H, W) cell, bool
    row_offset: int  # first inked row within the cell
    tight: np.ndarray  # tight crop, bool
    normalized: np.ndarray  # tight crop rescaled to (H, W), bool

    @property
    def char(self) -> str:
        return chr(self.codepoint)


class GlyphAtlas:
    """Fixed-cell bitmap font covering digits, Latin capitals, and a demo
    subset of Bengali-Assamese and Devanagari letters."""

    def __init__(self, glyph_height: int, glyph_width: int, bitmaps: dict[int, np.ndarray]):
        if not bitmaps:
            raise ValueError("atlas needs at least one glyph")
        self.glyph_height = glyph_height
        self.glyph_width = glyph_width
        self.glyphs: dict[int, Glyph] = {}
        for cp in sorted(bitmaps):
            bitmap = np.asarray(bitmaps[cp], dtype=bool)
            if bitmap.shape != (glyph_height, glyph_width):
                raise ValueError(f"glyph U+{cp:04X} is {bitmap.shape}, atlas cell is {(glyph_height, glyph_width)}")
            tight = tight_crop(bitmap)
            row_offset = int(np.nonzero(bitmap.any(axis=1))[0][0])
            self.glyphs[cp] = Glyph(
                codepoint=cp,
                bitmap=bitmap,
                row_offset=row_offset,
                tight=tight,
                normalized=resample_binary(tight, glyph_height, glyph_width),
            )

    def __len__(self) -> int:
        return len(self.glyphs)

    def __contains__(self, ch: str) -> bool:
        return ord(ch) in self.glyphs

    def supports(self, text: str) -> bool:
        return all(ch == " " or ord(ch) in self.glyphs for ch in text)

    @property
    def covered_scripts(self) -> set[ScriptTag]:
        tags = {identify_script(chr(cp)) for cp in self.glyphs}
        tags.discard(ScriptTag.MIXED)
        return tags

    # --- file format ---

    @classmethod
    def parse(cls, text: str) -> "GlyphAtlas":
        lines = [ln.rstrip("\n") for ln in text.splitlines()]
        lines = [ln for ln in lines if ln.strip() != ""]
        if not lines:
            raise ValueError("empty atlas file")
        header = lines[0].split()
        if len(header) != 4 or header[0] != "atlas" or header[1] != "v1":
            raise ValueError(f"bad atlas header: {lines[0]!r}")
        h, w = int(header[2]), int(header[3])
        bitmaps: dict[int, np.ndarray] = {}
        i = 1
        while i < len(lines):
            head = lines[i].strip()
            if not head.startswith("U+"):
                raise ValueError(f"expected codepoint line, got {head!r}")
            cp = int(head[2:], 16)
            if cp in bitmaps:
                raise ValueError(f"duplicate codepoint U+{cp:04X}")
            rows = lines[i + 1 : i + 1 + h]
            if len(rows) != h:
                raise ValueError(f"glyph U+{cp:04X}: expected {h} rows")
            grid = np.zeros((h, w), dtype=bool)
            for r, row in enumerate(rows):
                if len(row) != w or set(row) - {".", "#"}:
                    raise ValueError(f"glyph U+{cp:04X} row {r}: bad row {row!r}")
                grid[r] = [c == "#" for c in row]
            bitmaps[cp] = grid
            i += 1 + h
        return cls(h, w, bitmaps)

    @classmethod
    def load(cls, path: str | Path) -> "GlyphAtlas":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def serialize(self) -> str:
        out = [f"atlas v1 {self.glyph_height} {self.glyph_width}"]
        for cp in sorted(self.glyphs):
            out.append(f"U+{cp:04X}")
            for row in self.glyphs[cp].bitmap:
                out.append("".join("#" if v else "." for v in row))
            out.append("")
        return "\n".join(out)

    # --- rendering (also the identity oracle for the template recognizer) ---

    @staticmethod
    def _bridge_diagonal_joints(tight: np.ndarray, scale: int, ink: np.ndarray) -> np.ndarray:
        """Fill a 2x2 elbow wherever two ink cells meet only at a corner.

        Upscaled corner-only contacts are one pixel wide and shear apart
        under the mildest pixel noise; real rasterizers do not produce
        them either. From scale 3 up the filled pixels stay under half of
        any resample block, so glyph normalization is unchanged; below
        that the glyphs are left bare to keep normalization exact.
        """
        if scale < 3:
            return ink
        th, tw = tight.shape
        for r in range(th - 1):
            for c in range(tw - 1):
                a, b = tight[r, c], tight[r + 1, c + 1]
                p, q = tight[r, c + 1], tight[r + 1, c]
                if a and b and not p and not q:
                    ink[r * scale + scale - 1, (c + 1) * scale] = True
                    ink[(r + 1) * scale, c * scale + scale - 1] = True
                elif p and q and not a and not b:
                    ink[r * scale + scale - 1, c * scale + scale - 1] = True
                    ink[(r + 1) * scale, (c + 1) * scale] = True
        return ink

    def render_string(
        self,
        text: str,
        scale: int = 4,
        letter_gap: int = 1,
        word_gap: int = 4,
    ) -> tuple[np.ndarray, list[Box]]:
        """Render one line of text to an ink mask plus per-glyph boxes.

        Gaps are in cell units; a space adds word_gap on top of the trailing
        letter_gap, which keeps intra-word gaps at letter_gap*scale pixels
        and inter-word gaps comfortably above half a glyph width.
        """
        if scale < 1:
            raise ValueError("scale must be >= 1")
        placements = []
        x = 0
        for ch in text:
            if ch == " ":
                x += word_gap * scale
                continue
            glyph = self.glyphs.get(ord(ch))
            if glyph is None:
                raise KeyError(f"atlas has no glyph for {ch!r} (U+{ord(ch):04X})")
            th, tw = glyph.tight.shape
            box = Box(x, glyph.row_offset * scale, tw * scale, th * scale)
            placements.append((glyph, box))
            x += (tw + letter_gap) * scale
        height = self.glyph_height * scale
        width = max(x - letter_gap * scale, 1)
        mask = np.zeros((height, width), dtype=bool)
        boxes = []
        for glyph, box in placements:
            ink = scale_nearest(glyph.tight, box.h, box.w).copy()
            ink = self._bridge_diagonal_joints(glyph.tight, scale, ink)
            mask[box.y : box.y2, box.x : box.x2] |= ink
            boxes.append(box)
        return mask, boxes


_DEFAULT: GlyphAtlas | None = None


def default_atlas() -> GlyphAtlas:
    """The bundled atlas, parsed once per process."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("panelvoice.data").joinpath("default.atlas").read_text(encoding="utf-8")
        _DEFAULT = GlyphAtlas.parse(text)
    return _DEFAULT
