"""Backend comparison harness: detection, recognition, end-to-end, timing.

Metrics follow the usual desk-scale conventions: greedy IoU matching for
detection (deterministic, adequate at this corpus size), Levenshtein CER/WER
over normalized text, and nearest-rank p95 latency. CER is computed after
normalize_text on both sides so whitespace noise does not dominate; rates
other than CER/WER are bounded in [0, 1], while CER/WER are uncapped.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .composer import classify_category, parse_message, verbalize
from .corpus import Corpus, PanelRecord
from .detector import DetectorConfig, detect_text_regions
from .errors import (
    BackendTimeout,
    BackendUnavailable,
    EmptyInputError,
    EmptyReference,
    MissingDirection,
    ParseFailure,
    UnsupportedLanguage,
)
from .geometry import Box
from .raster import ensure_rgb, load_image, to_grayscale
from .recognizer import RecognitionHints, recognize
from .scripts import normalize_text
from .speech import SynthVoice, TimingBudget, check_feasibility, synthesize


def iou(a: Box, b: Box) -> float:
    """Intersection over union; 0 for disjoint boxes."""
    inter = a.intersection_area(b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        # Zero predictions assert nothing, so nothing is wrong.
        return self.tp / (self.tp + self.fp) if (self.tp + self.fp) else 1.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if (self.tp + self.fn) else 1.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if (p + r) else 0.0


def match_detections(pred: list[Box], gt: list[Box], tau: float = 0.5) -> MatchResult:
    """Greedy matching in descending IoU order, one-to-one, pairs below tau
    stay unmatched."""
    pairs = []
    for i, p in enumerate(pred):
        for j, g in enumerate(gt):
            score = iou(p, g)
            if score >= tau:
                pairs.append((score, i, j))
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
    used_pred: set[int] = set()
    used_gt: set[int] = set()
    tp = 0
    for score, i, j in pairs:
        if i in used_pred or j in used_gt:
            continue
        used_pred.add(i)
        used_gt.add(j)
        tp += 1
    return MatchResult(tp=tp, fp=len(pred) - tp, fn=len(gt) - tp)


def edit_distance(ref, hyp) -> int:
    """Levenshtein distance with unit costs, over any two sequences."""
    if len(ref) < len(hyp):
        ref, hyp = hyp, ref
    previous = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        current = [i]
        for j, h in enumerate(hyp, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (r != h)))
        previous = current
    return previous[-1]


def cer(ref: str, hyp: str) -> float:
    """Character error rate over Unicode scalar values; uncapped."""
    if not ref:
        raise EmptyReference("CER needs a nonempty reference")
    return edit_distance(ref, hyp) / len(ref)


def wer(ref: str, hyp: str) -> float:
    """Word error rate over whitespace tokens; uncapped."""
    ref_tokens = ref.split()
    if not ref_tokens:
        raise EmptyReference("WER needs a reference with at least one token")
    return edit_distance(ref_tokens, hyp.split()) / len(ref_tokens)


@dataclass(frozen=True)
class EvalReport:
    backend_id: str
    failed: bool = False
    error: str | None = None
    detection: dict = field(default_factory=dict)
    recognition: dict = field(default_factory=dict)
    end_to_end: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "backend_id": self.backend_id,
            "failed": self.failed,
            "error": self.error,
            "detection": self.detection,
            "recognition": self.recognition,
            "end_to_end": self.end_to_end,
            "timing": self.timing,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            backend_id=data["backend_id"],
            failed=data.get("failed", False),
            error=data.get("error"),
            detection=data.get("detection", {}),
            recognition=data.get("recognition", {}),
            end_to_end=data.get("end_to_end", {}),
            timing=data.get("timing", {}),
            metadata=data.get("metadata", {}),
        )


def _p95(values: list[float]) -> float:
    """Nearest-rank 95th percentile."""
    if not values:
        return 0.0
    ordered = sorted(values)
    rank = max(1, int(-(-0.95 * len(ordered) // 1)))  # ceil without math import
    return ordered[min(rank, len(ordered)) - 1]


def _reference_text(record: PanelRecord) -> str:
    regions = sorted(record.regions, key=lambda r: r.reading_order)
    return normalize_text(" ".join(r.transcript for r in regions))


def _utterance_for(record, lines, language=None):
    hint = record.direction_hint()
    category = classify_category(lines, direction_hint=hint)
    message = parse_message(lines, category, direction_hint=hint, language=language)
    return verbalize(message)


def run_benchmark(
    corpus: Corpus,
    backends: list,
    image_root: str | Path,
    pipeline_cfg: DetectorConfig | None = None,
    reference_speed_mps: float = 20.0,
    distance_m: float = 100.0,
    tts_backend=None,
    voice: SynthVoice | None = None,
    iou_tau: float = 0.5,
) -> list[EvalReport]:
    """Run the full pipeline per backend per record and aggregate metrics.

    A backend that raises BackendUnavailable/BackendTimeout on some record
    yields a report marked failed; the run continues with the others.
    """
    from .speech import BuiltinSynthBackend

    root = Path(image_root)
    cfg = pipeline_cfg or DetectorConfig()
    tts = tts_backend or BuiltinSynthBackend()
    voice = voice or SynthVoice()

    reports = []
    for backend in backends:
        cers: list[float] = []
        wers: list[float] = []
        empty_outputs = 0
        utterances = 0
        feasible_count = 0
        times: list[float] = []
        tp = fp = fn = 0
        failure: str | None = None

        for record in corpus:
            started = time.perf_counter()
            image = ensure_rgb(load_image(root / record.image_path))
            regions = detect_text_regions(image, cfg)
            gray = to_grayscale(image)

            matched = match_detections([r.box for r in regions], [g.box for g in record.regions], iou_tau)
            tp += matched.tp
            fp += matched.fp
            fn += matched.fn

            hints = RecognitionHints(category=record.category)
            lines = []
            try:
                for region in regions:
                    result = recognize(backend, gray.crop(region.box), hints)
                    for line in result.lines:
                        lines.append(line.text)
            except (BackendUnavailable, BackendTimeout) as exc:
                failure = str(exc)
                break

            hyp = normalize_text(" ".join(lines))
            ref = _reference_text(record)
            if not hyp:
                empty_outputs += 1
            if ref:
                cers.append(cer(ref, hyp))
                wers.append(wer(ref, hyp))

            clip = None
            try:
                utterance = _utterance_for(record, [ln for ln in lines if ln.strip()])
                utterances += 1
                clip = synthesize(tts, utterance, voice)
            except (EmptyInputError, ParseFailure, MissingDirection, UnsupportedLanguage):
                pass
            elapsed = time.perf_counter() - started
            times.append(elapsed)
            if clip is not None:
                budget = TimingBudget(
                    distance_m=distance_m,
                    speed_mps=reference_speed_mps,
                    processing_s=elapsed,
                    speech_s=clip.duration,
                )
                if check_feasibility(budget).feasible:
                    feasible_count += 1

        if failure is not None:
            reports.append(EvalReport(backend_id=backend.id, failed=True, error=failure))
            continue

        total = len(corpus)
        detection = MatchResult(tp=tp, fp=fp, fn=fn)
        reports.append(
            EvalReport(
                backend_id=backend.id,
                detection={
                    "precision": detection.precision,
                    "recall": detection.recall,
                    "f1": detection.f1,
                    "iou_threshold": iou_tau,
                },
                recognition={
                    "mean_cer": sum(cers) / len(cers) if cers else 0.0,
                    "mean_wer": sum(wers) / len(wers) if wers else 0.0,
                    "empty_output_rate": empty_outputs / total if total else 0.0,
                },
                end_to_end={
                    "utterance_rate": utterances / total if total else 0.0,
                    "feasibility_rate": feasible_count / total if total else 0.0,
                    "reference_speed_mps": reference_speed_mps,
                    "distance_m": distance_m,
                },
                timing={
                    "mean_s": sum(times) / len(times) if times else 0.0,
                    "p95_s": _p95(times),
                },
                metadata={"text_normalization": "normalize_text applied to both sides before CER/WER"},
            )
        )
    return reports


def write_report(reports: list[EvalReport], path: str | Path, format: str = "json") -> None:
    """Persist reports as JSON (stable field order) or an aligned text table."""
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        return
    if format == "text_table":
        path.write_text(format_report_table(reports) + "\n", encoding="utf-8")
        return
    raise ValueError(f"unknown report format {format!r}")


def read_report(path: str | Path) -> list[EvalReport]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [EvalReport.from_dict(entry) for entry in data]


_TABLE_COLUMNS = [
    ("backend", lambda r: r.backend_id),
    ("status", lambda r: "FAILED" if r.failed else "ok"),
    ("P", lambda r: _fmt(r.detection.get("precision"))),
    ("R", lambda r: _fmt(r.detection.get("recall"))),
    ("F1", lambda r: _fmt(r.detection.get("f1"))),
    ("CER", lambda r: _fmt(r.recognition.get("mean_cer"))),
    ("WER", lambda r: _fmt(r.recognition.get("mean_wer"))),
    ("empty", lambda r: _fmt(r.recognition.get("empty_output_rate"))),
    ("utter", lambda r: _fmt(r.end_to_end.get("utterance_rate"))),
    ("feas", lambda r: _fmt(r.end_to_end.get("feasibility_rate"))),
    ("mean_s", lambda r: _fmt(r.timing.get("mean_s"), 4)),
    ("p95_s", lambda r: _fmt(r.timing.get("p95_s"), 4)),
]


def _fmt(value, digits: int = 3) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def format_report_table(reports: list[EvalReport]) -> str:
    rows = [[header for header, _ in _TABLE_COLUMNS]]
    for report in reports:
        rows.append([extract(report) for _, extract in _TABLE_COLUMNS])
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines)
