"""Turn recognized lines into a structured message and a speakable utterance.

Categories follow the four-way panel taxonomy: 1 destination+distance,
2 location+direction, 3 place-name, 4 caution text. Templates and the
distance-unit / caution lexicons are data (templates.cfg), not code, so
phrasing can be corrected without touching the pipeline.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmptyInputError, MissingDirection, ParseFailure, UnsupportedLanguage
from .scripts import Direction, Language, dominant_script, script_to_language

_PUNCT = ".,;:!?।॥()[]"


@dataclass(frozen=True)
class MessageItem:
    place: str
    distance_km: float | None = None
    direction: Direction | None = None

    def __post_init__(self):
        if not self.place.strip():
            raise ValueError("place must be a nonempty string")
        if self.distance_km is not None and self.distance_km < 0:
            raise ValueError("distance_km must be non-negative")

    def to_dict(self):
        out = {"place": self.place}
        if self.distance_km is not None:
            out["distance_km"] = self.distance_km
        if self.direction is not None:
            out["direction"] = self.direction.value
        return out


@dataclass(frozen=True)
class PanelMessage:
    category: int
    items: tuple[MessageItem, ...]
    language: Language
    caution_text: str | None = None

    def __post_init__(self):
        if self.category not in (1, 2, 3, 4):
            raise ValueError(f"category {self.category} outside 1-4")
        if self.category == 1 and any(item.distance_km is None for item in self.items):
            raise ValueError("category-1 items all need distance_km")
        if self.category == 4 and not (self.caution_text or "").strip():
            raise ValueError("category 4 needs caution_text")

    def to_dict(self):
        out = {
            "category": self.category,
            "items": [item.to_dict() for item in self.items],
            "language": self.language.tag,
        }
        if self.caution_text is not None:
            out["caution_text"] = self.caution_text
        return out


@dataclass(frozen=True)
class Utterance:
    text: str
    language: Language
    estimated_words: int

    def __post_init__(self):
        if self.estimated_words != len(self.text.split()):
            raise ValueError("estimated_words must equal the whitespace-token count")

    def to_dict(self):
        return {"text": self.text, "language": self.language.tag, "estimated_words": self.estimated_words}


def make_utterance(text: str, language: Language) -> Utterance:
    return Utterance(text=text, language=language, estimated_words=len(text.split()))


class TemplateTable:
    """Per-language sentence templates plus the shared parsing lexicons."""

    def __init__(self, parser: configparser.ConfigParser):
        self._parser = parser
        lex = parser["lexicon"] if parser.has_section("lexicon") else {}
        self.units = frozenset(lex.get("units", "").split())
        self.caution_stems = tuple(lex.get("caution", "").split())
        self.direction_words = frozenset(w.casefold() for w in lex.get("direction_words", "").split())

    @classmethod
    def load(cls, path: str | Path) -> "TemplateTable":
        parser = configparser.ConfigParser(interpolation=None)
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        return cls(parser)

    @classmethod
    def parse(cls, text: str) -> "TemplateTable":
        parser = configparser.ConfigParser(interpolation=None)
        parser.read_string(text)
        return cls(parser)

    def section(self, language: Language) -> configparser.SectionProxy:
        tag = language.tag
        if not self._parser.has_section(tag):
            raise UnsupportedLanguage(f"no template section for language {tag!r}")
        return self._parser[tag]

    def template(self, language: Language, category: int) -> str:
        section = self.section(language)
        key = f"category{category}"
        if key not in section:
            raise UnsupportedLanguage(f"language {language.tag!r} has no {key} template")
        return section[key]

    def direction_phrase(self, language: Language, direction: Direction) -> str:
        section = self.section(language)
        key = f"dir_{direction.value}"
        if key not in section:
            raise UnsupportedLanguage(f"language {language.tag!r} has no {key} phrase")
        return section[key]


_DEFAULT_TABLE: TemplateTable | None = None


def default_templates() -> TemplateTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        text = resources.files("panelvoice.data").joinpath("templates.cfg").read_text(encoding="utf-8")
        _DEFAULT_TABLE = TemplateTable.parse(text)
    return _DEFAULT_TABLE


def _tokens(line: str) -> list[str]:
    return [t.strip(_PUNCT) for t in line.split() if t.strip(_PUNCT)]


def _is_number(token: str) -> bool:
    try:
        return float(token) >= 0
    except ValueError:
        return False


def _split_distance_line(line: str, units: frozenset[str]):
    """(place, number, unit-ok) at the first number token, or None."""
    tokens = _tokens(line)
    for i, tok in enumerate(tokens):
        if _is_number(tok):
            if i == 0 or i + 1 >= len(tokens) or tokens[i + 1] not in units:
                return None
            return " ".join(tokens[:i]), float(tok)
    return None


def classify_category(
    lines,
    direction_hint: Direction | None = None,
    templates: TemplateTable | None = None,
) -> int:
    """Rule cascade: distance line -> 1, direction evidence -> 2,
    caution-lexicon hit -> 4, else 3."""
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise EmptyInputError("no text lines to classify")
    table = templates or default_templates()
    if any(_split_distance_line(ln, table.units) for ln in lines):
        return 1
    if direction_hint is not None and direction_hint is not Direction.UNKNOWN:
        return 2
    for line in lines:
        for tok in _tokens(line):
            if tok.casefold() in table.direction_words:
                return 2
    for line in lines:
        for tok in _tokens(line):
            folded = tok.casefold()
            if any(folded.startswith(stem.casefold()) for stem in table.caution_stems):
                return 4
    return 3


def parse_message(
    lines,
    category: int,
    direction_hint: Direction | None = None,
    language: Language | None = None,
    templates: TemplateTable | None = None,
) -> PanelMessage:
    """Build the structured message for a known category.

    Category 1 keeps every line that parses as <place> <number> <unit> and
    fails only when none does, so classification implies parseability.
    """
    lines = [ln.strip() for ln in lines if ln.strip()]
    if not lines:
        raise EmptyInputError("no text lines to parse")
    table = templates or default_templates()
    if language is None:
        language = script_to_language(dominant_script(lines))

    if category == 1:
        items = []
        for line in lines:
            parsed = _split_distance_line(line, table.units)
            if parsed is not None:
                items.append(MessageItem(place=parsed[0], distance_km=parsed[1]))
        if not items:
            raise ParseFailure(f"no line matches <place> <number> <unit>: {lines!r}")
        return PanelMessage(category=1, items=tuple(items), language=language)
    if category == 2:
        if direction_hint is None or direction_hint is Direction.UNKNOWN:
            raise MissingDirection("category 2 needs an annotated direction")
        items = tuple(MessageItem(place=line, direction=direction_hint) for line in lines)
        return PanelMessage(category=2, items=items, language=language)
    if category == 3:
        return PanelMessage(category=3, items=(MessageItem(place=" ".join(lines)),), language=language)
    if category == 4:
        return PanelMessage(category=4, items=(), language=language, caution_text=" ".join(lines))
    raise ValueError(f"category {category} outside 1-4")


def _format_distance(n: float) -> str:
    return f"{n:g}"


def verbalize(
    msg: PanelMessage,
    language: Language | None = None,
    templates: TemplateTable | None = None,
) -> Utterance:
    """Render the per-(category, language) template; numbers stay digits."""
    table = templates or default_templates()
    language = language or msg.language
    template = table.template(language, msg.category)
    if msg.category == 1:
        sentences = [
            template.format(place=item.place, n=_format_distance(item.distance_km))
            for item in msg.items
        ]
        text = " ".join(sentences)
    elif msg.category == 2:
        sentences = [
            template.format(place=item.place, dir=table.direction_phrase(language, item.direction))
            for item in msg.items
        ]
        text = " ".join(sentences)
    elif msg.category == 3:
        text = " ".join(template.format(place=item.place) for item in msg.items)
    else:
        text = template.format(text=msg.caution_text)
    return make_utterance(text, language)
