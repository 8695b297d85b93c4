"""Annotated traffic-panel corpus: manifest schema, loading, validation, stats.

Manifest format: a single UTF-8 JSON file with a ``records`` array; image
paths are relative to the manifest's directory::

    {"records": [{"id": "p01", "image": "images/p01.png", "category": 1,
                  "languages": ["English"], "source": "photograph",
                  "note": "...",
                  "regions": [{"box": [x, y, w, h], "transcript": "...",
                               "script": "Latin", "order": 0,
                               "direction": "left"}]}]}

All loaded values are immutable; every operation here is pure, so corpora
can be shared freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import DuplicateIdError, InvalidCategoryError, ManifestError
from .geometry import Box
from .scripts import Direction, Language, ScriptTag

CATEGORIES = (1, 2, 3, 4)

# Category semantics: 1 destination+distance, 2 location+direction,
# 3 place-name, 4 caution text.
CATEGORY_NAMES = {
    1: "destination+distance",
    2: "location+direction",
    3: "place-name",
    4: "caution",
}


class Source(Enum):
    VIDEO_FRAME = "video_frame"
    PHOTOGRAPH = "photograph"
    ONLINE = "online"


@dataclass(frozen=True)
class GroundTruthRegion:
    box: Box
    transcript: str
    script: ScriptTag
    reading_order: int
    direction: Direction | None = None

    def __post_init__(self):
        if self.reading_order < 0:
            raise ManifestError(f"reading_order must be >= 0, got {self.reading_order}")


@dataclass(frozen=True)
class PanelRecord:
    id: str
    image_path: str
    category: int
    languages: frozenset[Language]
    source: Source
    regions: tuple[GroundTruthRegion, ...] = ()
    capture_note: str | None = None

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise InvalidCategoryError(f"record {self.id!r}: category {self.category} outside 1-4")
        if not self.languages:
            raise ManifestError(f"record {self.id!r}: languages must be nonempty")

    def direction_hint(self) -> Direction | None:
        """First annotated direction, if any (category-2 annotation field)."""
        for region in self.regions:
            if region.direction is not None and region.direction is not Direction.UNKNOWN:
                return region.direction
        return None


@dataclass(frozen=True)
class Corpus:
    """Record list plus any warnings accumulated while loading."""

    records: tuple[PanelRecord, ...]
    warnings: tuple[str, ...] = ()

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]


@dataclass(frozen=True)
class Finding:
    record_id: str
    kind: str
    detail: str

    def to_dict(self):
        return {"record_id": self.record_id, "kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings

    def to_dict(self):
        return {"ok": self.ok, "findings": [f.to_dict() for f in self.findings]}


@dataclass(frozen=True)
class CorpusStats:
    total: int
    per_category: dict[int, int] = field(default_factory=dict)
    per_language: dict[Language, int] = field(default_factory=dict)
    per_source: dict[Source, int] = field(default_factory=dict)

    def to_dict(self):
        return {
            "total": self.total,
            "per_category": {str(k): v for k, v in sorted(self.per_category.items())},
            "per_language": {k.value: v for k, v in sorted(self.per_language.items(), key=lambda kv: kv[0].value)},
            "per_source": {k.value: v for k, v in sorted(self.per_source.items(), key=lambda kv: kv[0].value)},
        }


_RECORD_KEYS = {"id", "image", "category", "languages", "source", "note", "regions"}
_REGION_KEYS = {"box", "transcript", "script", "order", "direction"}


def _parse_enum(enum_cls, value, context):
    try:
        return enum_cls(value)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise ManifestError(f"{context}: {value!r} not one of [{valid}]") from None


def _parse_region(raw: dict, context: str, warnings: list[str]) -> GroundTruthRegion:
    for key in raw.keys() - _REGION_KEYS:
        warnings.append(f"{context}: unknown region field {key!r} ignored")
    try:
        box = Box.from_list(raw["box"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"{context}: bad box: {exc}") from None
    direction = None
    if raw.get("direction") is not None:
        direction = _parse_enum(Direction, raw["direction"], f"{context}: direction")
    try:
        return GroundTruthRegion(
            box=box,
            transcript=str(raw["transcript"]),
            script=_parse_enum(ScriptTag, raw["script"], f"{context}: script"),
            reading_order=int(raw["order"]),
            direction=direction,
        )
    except KeyError as exc:
        raise ManifestError(f"{context}: missing region field {exc}") from None


def _parse_record(raw: dict, warnings: list[str]) -> PanelRecord:
    rid = str(raw.get("id", "<missing id>"))
    context = f"record {rid!r}"
    for key in raw.keys() - _RECORD_KEYS:
        warnings.append(f"{context}: unknown field {key!r} ignored")
    try:
        category = int(raw["category"])
        image = str(raw["image"])
        languages = frozenset(
            _parse_enum(Language, lang, f"{context}: language") for lang in raw["languages"]
        )
        source = _parse_enum(Source, raw["source"], f"{context}: source")
    except KeyError as exc:
        raise ManifestError(f"{context}: missing field {exc}") from None
    except TypeError as exc:
        raise ManifestError(f"{context}: {exc}") from None
    regions = tuple(
        _parse_region(r, f"{context} region {i}", warnings)
        for i, r in enumerate(raw.get("regions", []))
    )
    return PanelRecord(
        id=str(raw["id"]),
        image_path=image,
        category=category,
        languages=languages,
        source=source,
        regions=regions,
        capture_note=raw.get("note"),
    )


def load_manifest(path: str | Path) -> Corpus:
    """Parse a manifest file; unknown fields are ignored with a warning."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict) or "records" not in doc:
        raise ManifestError(f"{path}: manifest must be an object with a 'records' array")

    warnings: list[str] = []
    for key in doc.keys() - {"records"}:
        warnings.append(f"manifest: unknown top-level field {key!r} ignored")
    records = []
    seen_ids = set()
    for raw in doc["records"]:
        record = _parse_record(raw, warnings)
        if record.id in seen_ids:
            raise DuplicateIdError(f"duplicate record id {record.id!r}")
        seen_ids.add(record.id)
        records.append(record)
    return Corpus(records=tuple(records), warnings=tuple(warnings))


def record_to_dict(record: PanelRecord) -> dict:
    out = {
        "id": record.id,
        "image": record.image_path,
        "category": record.category,
        "languages": sorted(lang.value for lang in record.languages),
        "source": record.source.value,
        "regions": [
            {
                "box": region.box.to_list(),
                "transcript": region.transcript,
                "script": region.script.value,
                "order": region.reading_order,
                **({"direction": region.direction.value} if region.direction else {}),
            }
            for region in record.regions
        ],
    }
    if record.capture_note is not None:
        out["note"] = record.capture_note
    return out


def save_manifest(corpus: Corpus | list[PanelRecord], path: str | Path) -> None:
    records = list(corpus)
    doc = {"records": [record_to_dict(r) for r in records]}
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def _image_size(path: Path) -> tuple[int, int] | None:
    from PIL import Image

    try:
        with Image.open(path) as im:
            return im.size  # (w, h)
    except Exception:
        return None


def validate_corpus(corpus: Corpus, image_root: str | Path) -> ValidationReport:
    """Check every record against its image; findings are data, not errors."""
    root = Path(image_root)
    findings: list[Finding] = []
    for record in corpus:
        img_path = root / record.image_path
        size = _image_size(img_path) if img_path.is_file() else None
        if size is None:
            findings.append(Finding(record.id, "missing_image", f"cannot open {img_path}"))
        seen_orders = set()
        for i, region in enumerate(record.regions):
            if size is not None and not region.box.inside(size[0], size[1]):
                findings.append(
                    Finding(record.id, "box_out_of_bounds", f"region {i} box {region.box.to_list()} outside {size[0]}x{size[1]}")
                )
            if region.reading_order in seen_orders:
                findings.append(
                    Finding(record.id, "duplicate_reading_order", f"region {i} repeats order {region.reading_order}")
                )
            seen_orders.add(region.reading_order)
            if not region.transcript.strip():
                findings.append(Finding(record.id, "empty_transcript", f"region {i} has empty transcript"))
        if not record.regions and not (record.capture_note or "").strip():
            findings.append(Finding(record.id, "empty_regions_without_note", "no regions and no capture note"))
    return ValidationReport(findings=tuple(findings))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    per_category: dict[int, int] = {}
    per_language: dict[Language, int] = {}
    per_source: dict[Source, int] = {}
    for record in corpus:
        per_category[record.category] = per_category.get(record.category, 0) + 1
        per_source[record.source] = per_source.get(record.source, 0) + 1
        for lang in record.languages:
            per_language[lang] = per_language.get(lang, 0) + 1
    return CorpusStats(
        total=len(corpus),
        per_category=per_category,
        per_language=per_language,
        per_source=per_source,
    )


def filter_corpus(
    corpus: Corpus,
    predicate=None,
    *,
    category: int | None = None,
    language: Language | None = None,
    source: Source | None = None,
) -> Corpus:
    """Order-preserving subset; combine a callable with field shortcuts."""

    def keep(record: PanelRecord) -> bool:
        if category is not None and record.category != category:
            return False
        if language is not None and language not in record.languages:
            return False
        if source is not None and record.source is not source:
            return False
        if predicate is not None and not predicate(record):
            return False
        return True

    return Corpus(records=tuple(r for r in corpus if keep(r)), warnings=corpus.warnings)
