"""panelvoice: traffic-panel photographs to spoken feedback.

Detect text areas on roadside panels, recognize Assamese / Hindi / English
text through pluggable OCR backends, compose a category-appropriate
utterance, synthesize it to WAV, and check the result fits the time window
before the vehicle passes the panel. Ships corpus tooling, a deterministic
builtin recognizer/synthesizer pair for testing, and a backend benchmark
harness.
"""

__version__ = "0.1.0"

from .composer import PanelMessage, Utterance, classify_category, parse_message, verbalize
from .corpus import (
    Corpus,
    CorpusStats,
    GroundTruthRegion,
    PanelRecord,
    corpus_stats,
    filter_corpus,
    load_manifest,
    save_manifest,
    validate_corpus,
)
from .detector import DetectorConfig, TextRegion, detect_text_regions
from .evaluation import EvalReport, cer, edit_distance, iou, match_detections, run_benchmark, wer
from .geometry import Box
from .pipeline import PipelineConfig, PipelineResult, run_pipeline
from .raster import Channels, Component, RasterImage
from .recognizer import RecognizedText, identify_script, normalize_text, recognize, template_recognize
from .scripts import Direction, Language, ScriptTag
from .speech import (
    AudioClip,
    TimingBudget,
    builtin_synthesize,
    check_feasibility,
    estimate_duration,
    max_speed_for,
    synthesize,
    write_wav,
)

__all__ = [
    "AudioClip",
    "Box",
    "Channels",
    "Component",
    "Corpus",
    "CorpusStats",
    "DetectorConfig",
    "Direction",
    "EvalReport",
    "GroundTruthRegion",
    "Language",
    "PanelMessage",
    "PanelRecord",
    "PipelineConfig",
    "PipelineResult",
    "RasterImage",
    "RecognizedText",
    "ScriptTag",
    "TextRegion",
    "TimingBudget",
    "Utterance",
    "builtin_synthesize",
    "cer",
    "check_feasibility",
    "classify_category",
    "corpus_stats",
    "detect_text_regions",
    "edit_distance",
    "estimate_duration",
    "filter_corpus",
    "identify_script",
    "iou",
    "load_manifest",
    "match_detections",
    "max_speed_for",
    "normalize_text",
    "parse_message",
    "recognize",
    "run_benchmark",
    "run_pipeline",
    "save_manifest",
    "synthesize",
    "template_recognize",
    "validate_corpus",
    "verbalize",
    "wer",
]
