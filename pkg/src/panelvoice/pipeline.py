"""Config-driven orchestration of detect -> recognize -> compose -> speak.

Stages never abort the run: failures are recorded as stage notes and the
result keeps whatever was produced up to that point (a driving assistant
degrades, it does not crash). The CLI decides how notes map to exit codes.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .composer import PanelMessage, Utterance, classify_category, parse_message, verbalize
from .detector import DetectorConfig, TextRegion, detect_text_regions
from .errors import (
    BackendTimeout,
    BackendUnavailable,
    ConfigError,
    EmptyInputError,
    EmptyUtterance,
    MissingDirection,
    ParseFailure,
    UnsupportedLanguage,
)
from .raster import ensure_rgb, load_image, save_image, to_grayscale
from .recognizer import RecognitionHints, RecognizedLine, RecognizedText, make_ocr_backend, recognize
from .scripts import Direction, Language
from .speech import (
    AudioClip,
    SynthVoice,
    TimingBudget,
    check_feasibility,
    make_synth_backend,
    synthesize,
    write_wav,
)

DEFAULT_OCR_SPEC = {"kind": "builtin_template", "id": "builtin"}
DEFAULT_TTS_SPEC = {"kind": "builtin", "id": "builtin"}


@dataclass(frozen=True)
class PipelineConfig:
    detector: DetectorConfig = DetectorConfig()
    ocr_backend: dict = field(default_factory=lambda: dict(DEFAULT_OCR_SPEC))
    tts_backend: dict = field(default_factory=lambda: dict(DEFAULT_TTS_SPEC))
    language: str = "auto"  # auto = dominant script of the recognized text
    rate_wpm: int = 150
    sample_rate: int = 22050
    distance_m: float = 100.0
    speed_mps: float = 20.0
    out_dir: str | None = None

    def __post_init__(self):
        if self.language != "auto":
            try:
                _language_from_tag(self.language)
            except KeyError:
                raise ConfigError(f"unsupported output language {self.language!r}") from None
        if self.rate_wpm <= 0 or self.sample_rate <= 0:
            raise ConfigError("rate_wpm and sample_rate must be positive")

    def to_dict(self) -> dict:
        return {
            "detector": self.detector.to_dict(),
            "ocr_backend": dict(self.ocr_backend),
            "tts_backend": dict(self.tts_backend),
            "language": self.language,
            "rate_wpm": self.rate_wpm,
            "sample_rate": self.sample_rate,
            "timing": {"distance_m": self.distance_m, "speed_mps": self.speed_mps},
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        timing = data.pop("timing", {})
        known = {
            "detector": DetectorConfig.from_dict(data.get("detector", {})),
            "ocr_backend": dict(data.get("ocr_backend", DEFAULT_OCR_SPEC)),
            "tts_backend": dict(data.get("tts_backend", DEFAULT_TTS_SPEC)),
            "language": data.get("language", "auto"),
            "rate_wpm": int(data.get("rate_wpm", 150)),
            "sample_rate": int(data.get("sample_rate", 22050)),
            "distance_m": float(timing.get("distance_m", data.get("distance_m", 100.0))),
            "speed_mps": float(timing.get("speed_mps", data.get("speed_mps", 20.0))),
            "out_dir": data.get("out_dir"),
        }
        unknown = set(data) - {
            "detector", "ocr_backend", "tts_backend", "language", "rate_wpm",
            "sample_rate", "distance_m", "speed_mps", "out_dir",
        }
        if unknown:
            raise ConfigError(f"unknown pipeline config fields: {sorted(unknown)}")
        return cls(**known)


def load_config(path: str | Path) -> PipelineConfig:
    """Read a TOML (preferred) or JSON pipeline config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    data = None
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: bad JSON: {exc}") from exc
    else:
        try:
            import tomllib  # Python >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            try:
                data = json.loads(text)
            except json.JSONDecodeError:
                raise ConfigError(f"{path}: neither valid TOML nor JSON: {exc}") from exc
    return PipelineConfig.from_dict(data)


_TAG_LANGUAGE = {lang.tag: lang for lang in Language}


def _language_from_tag(tag: str) -> Language:
    return _TAG_LANGUAGE[tag]


@dataclass(frozen=True)
class PipelineResult:
    regions: tuple[TextRegion, ...]
    recognized: RecognizedText | None
    message: PanelMessage | None
    utterance: Utterance | None
    wav_path: str | None
    clip_duration: float | None
    stage_timings: dict
    feasibility: dict | None
    stage_notes: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.stage_notes

    def to_dict(self, include_volatile: bool = True) -> dict:
        out = {
            "regions": [
                {
                    "box": r.box.to_list(),
                    "line_index": r.line_index,
                    "component_boxes": [b.to_list() for b in r.component_boxes],
                    "score": r.score,
                }
                for r in self.regions
            ],
            "recognized": self.recognized.to_dict(include_elapsed=False) if self.recognized else None,
            "message": self.message.to_dict() if self.message else None,
            "utterance": self.utterance.to_dict() if self.utterance else None,
            "wav_path": self.wav_path,
            "clip_duration": self.clip_duration,
            "stage_notes": list(self.stage_notes),
            "ok": self.ok,
        }
        if include_volatile:
            out["stage_timings"] = dict(self.stage_timings)
            out["feasibility"] = dict(self.feasibility) if self.feasibility else None
        return out


def run_pipeline(
    image_path: str | Path,
    cfg: PipelineConfig | None = None,
    direction_hint: Direction | None = None,
    ocr_backend=None,
    tts_backend=None,
) -> PipelineResult:
    """Execute all stages on one image; see the module docstring for the
    failure policy. Backends may be passed in to reuse warm instances."""
    cfg = cfg or PipelineConfig()
    ocr = ocr_backend or make_ocr_backend(cfg.ocr_backend)
    tts = tts_backend or make_synth_backend(cfg.tts_backend)
    notes: list[str] = []
    timings = {"detect_s": 0.0, "ocr_s": 0.0, "compose_s": 0.0, "tts_s": 0.0}

    image = ensure_rgb(load_image(image_path))

    started = time.perf_counter()
    regions = tuple(detect_text_regions(image, cfg.detector))
    timings["detect_s"] = time.perf_counter() - started

    gray = to_grayscale(image)
    started = time.perf_counter()
    collected: list[RecognizedLine] = []
    recognized: RecognizedText | None = None
    try:
        for region in regions:
            result = recognize(ocr, gray.crop(region.box), RecognitionHints())
            collected.extend(result.lines)
        recognized = RecognizedText(lines=tuple(collected), backend_id=ocr.id)
    except (BackendUnavailable, BackendTimeout) as exc:
        notes.append(f"ocr: {exc}")
    timings["ocr_s"] = time.perf_counter() - started

    lines = [line.text for line in collected if line.text.strip()]
    message = None
    utterance = None
    if recognized is not None and not lines:
        notes.append("ocr: no text recognized")
    elif recognized is not None:
        started = time.perf_counter()
        language = None if cfg.language == "auto" else _language_from_tag(cfg.language)
        try:
            category = classify_category(lines, direction_hint=direction_hint)
            message = parse_message(lines, category, direction_hint=direction_hint, language=language)
            utterance = verbalize(message, language=language)
        except (EmptyInputError, ParseFailure, MissingDirection, UnsupportedLanguage) as exc:
            notes.append(f"compose: {exc}")
        timings["compose_s"] = time.perf_counter() - started

    wav_path = None
    clip: AudioClip | None = None
    if utterance is not None:
        started = time.perf_counter()
        try:
            voice = SynthVoice(
                language=utterance.language.tag,
                rate_wpm=cfg.rate_wpm,
                sample_rate=cfg.sample_rate,
            )
            clip = synthesize(tts, utterance, voice)
        except (BackendUnavailable, BackendTimeout, EmptyUtterance) as exc:
            notes.append(f"tts: {exc}")
        timings["tts_s"] = time.perf_counter() - started
        if clip is not None and cfg.out_dir is not None:
            audio_dir = Path(cfg.out_dir) / "audio"
            audio_dir.mkdir(parents=True, exist_ok=True)
            wav_path = str(audio_dir / "utterance.wav")
            write_wav(clip, wav_path)

    feasibility = None
    if clip is not None:
        processing = sum(timings.values())
        outcome = check_feasibility(
            TimingBudget(
                distance_m=cfg.distance_m,
                speed_mps=cfg.speed_mps,
                processing_s=processing,
                speech_s=clip.duration,
            )
        )
        feasibility = outcome.to_dict()

    if cfg.out_dir is not None:
        _write_artifacts(Path(cfg.out_dir), image, regions, lines)

    return PipelineResult(
        regions=regions,
        recognized=recognized,
        message=message,
        utterance=utterance,
        wav_path=wav_path,
        clip_duration=clip.duration if clip is not None else None,
        stage_timings=timings,
        feasibility=feasibility,
        stage_notes=tuple(notes),
    )


def _write_artifacts(out_dir: Path, image, regions, lines) -> None:
    regions_dir = out_dir / "regions"
    text_dir = out_dir / "text"
    regions_dir.mkdir(parents=True, exist_ok=True)
    text_dir.mkdir(parents=True, exist_ok=True)
    for region in regions:
        save_image(image.crop(region.box), regions_dir / f"region_{region.line_index:02d}.png")
    (text_dir / "recognized.txt").write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
