"""Script/language tags, Unicode-block script identification, text cleanup."""

from __future__ import annotations

import unicodedata
from enum import Enum


class ScriptTag(Enum):
    BENGALI_ASSAMESE = "BengaliAssamese"
    DEVANAGARI = "Devanagari"
    LATIN = "Latin"
    MIXED = "Mixed"


class Language(Enum):
    ASSAMESE = "Assamese"
    HINDI = "Hindi"
    ENGLISH = "English"

    @property
    def tag(self) -> str:
        return {"Assamese": "as", "Hindi": "hi", "English": "en"}[self.value]


class Direction(Enum):
    LEFT = "left"
    RIGHT = "right"
    STRAIGHT = "straight"
    UNKNOWN = "unknown"


# Unicode blocks: Bengali (shared by Assamese), Devanagari, Basic Latin letters.
_BENGALI = (0x0980, 0x09FF)
_DEVANAGARI = (0x0900, 0x097F)

_DIGIT_MAP = {}
for i in range(10):
    _DIGIT_MAP[0x0966 + i] = ord("0") + i  # Devanagari digits
    _DIGIT_MAP[0x09E6 + i] = ord("0") + i  # Bengali digits


def _letter_script(ch: str) -> ScriptTag | None:
    if not ch.isalpha():
        return None
    cp = ord(ch)
    if _BENGALI[0] <= cp <= _BENGALI[1]:
        return ScriptTag.BENGALI_ASSAMESE
    if _DEVANAGARI[0] <= cp <= _DEVANAGARI[1]:
        return ScriptTag.DEVANAGARI
    if ("A" <= ch <= "Z") or ("a" <= ch <= "z"):
        return ScriptTag.LATIN
    return None


def identify_script(text: str) -> ScriptTag:
    """Classify by the Unicode block of letter codepoints.

    Digits, punctuation, combining marks, and letters outside the three
    known blocks cast no vote. Letters from two or more blocks give Mixed;
    no letters at all gives Latin by convention.
    """
    seen = set()
    for ch in text:
        tag = _letter_script(ch)
        if tag is not None:
            seen.add(tag)
    if not seen:
        return ScriptTag.LATIN
    if len(seen) > 1:
        return ScriptTag.MIXED
    return seen.pop()


def normalize_text(text: str) -> str:
    """Trim, collapse whitespace, drop non-printables, ASCII-fy Indic digits, NFC.

    Idempotent: a second pass is the identity.
    """
    text = text.translate(_DIGIT_MAP)
    cleaned = []
    for ch in text:
        if unicodedata.category(ch).startswith("C"):
            if ch.isspace():
                cleaned.append(" ")
            continue
        cleaned.append(ch)
    collapsed = " ".join("".join(cleaned).split())
    return unicodedata.normalize("NFC", collapsed)


def script_to_language(tag: ScriptTag) -> Language:
    """Dominant-script to output-language mapping; Mixed falls back to English."""
    return {
        ScriptTag.BENGALI_ASSAMESE: Language.ASSAMESE,
        ScriptTag.DEVANAGARI: Language.HINDI,
        ScriptTag.LATIN: Language.ENGLISH,
        ScriptTag.MIXED: Language.ENGLISH,
    }[tag]


def dominant_script(texts) -> ScriptTag:
    """Most frequent letter script across the given texts (ties: Latin last)."""
    counts = {ScriptTag.BENGALI_ASSAMESE: 0, ScriptTag.DEVANAGARI: 0, ScriptTag.LATIN: 0}
    for text in texts:
        for ch in text:
            tag = _letter_script(ch)
            if tag is not None:
                counts[tag] += 1
    if not any(counts.values()):
        return ScriptTag.LATIN
    # Highest count wins; Latin loses ties so Indic panels keep their language.
    order = [ScriptTag.BENGALI_ASSAMESE, ScriptTag.DEVANAGARI, ScriptTag.LATIN]
    return max(order, key=lambda t: (counts[t], -order.index(t)))
