"""panelvoice command line: corpus tooling, stage commands, pipeline, eval.

Exit codes: 0 success, 1 usage/IO/config errors, 2 pipeline stage failure
(suppressed by --lenient).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .composer import classify_category, make_utterance, parse_message, verbalize
from .corpus import corpus_stats, load_manifest, validate_corpus
from .errors import PanelVoiceError
from .evaluation import format_report_table, run_benchmark, write_report
from .pipeline import PipelineConfig, load_config, run_pipeline
from .raster import ensure_rgb, load_image, save_image, to_grayscale
from .recognizer import RecognitionHints, make_ocr_backend, recognize
from .scripts import Direction, Language
from .speech import SynthVoice, estimate_duration, make_synth_backend, synthesize, write_wav

CONFIG_ENV_VAR = "PANELVOICE_CONFIG"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(payload, as_json: bool, text: str):
    if as_json:
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        print(text)


def _resolve_config(path: str | None) -> PipelineConfig:
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if path:
        return load_config(path)
    return PipelineConfig()


def _parse_direction(value: str | None) -> Direction | None:
    return Direction(value) if value else None


def _language_for_tag(tag: str | None) -> Language | None:
    if tag is None:
        return None
    for lang in Language:
        if lang.tag == tag:
            return lang
    raise PanelVoiceError(f"unsupported language tag {tag!r} (use en/hi/as)")


def build_parser() -> _Parser:
    parser = _Parser(prog="panelvoice", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = sub.add_parser("corpus", help="corpus tooling")
    corpus_sub = corpus.add_subparsers(dest="corpus_command", required=True)

    validate = corpus_sub.add_parser("validate", help="check manifest against images; exit 1 on findings")
    validate.add_argument("manifest")
    validate.add_argument("--image-root", help="defaults to the manifest's directory")
    validate.add_argument("--json", action="store_true")

    stats = corpus_sub.add_parser("stats", help="corpus counts per category/language/source")
    stats.add_argument("manifest")
    stats.add_argument("--json", action="store_true")

    synth = corpus_sub.add_parser("synth", help="render the bundled synthetic corpus")
    synth.add_argument("out_dir")
    synth.add_argument("--scale", type=int, default=4)
    synth.add_argument("--seed", type=int, default=20180830)
    synth.add_argument("--noise", type=float, action="append", help="noise level; repeatable (default 0.0 and 0.03)")
    synth.add_argument("--json", action="store_true")

    detect = sub.add_parser("detect", help="stage 1: text regions of one image")
    detect.add_argument("image")
    detect.add_argument("--config")
    detect.add_argument("--out-dir")
    detect.add_argument("--json", action="store_true")

    rec = sub.add_parser("recognize", help="stages 1-2: recognized lines of one image")
    rec.add_argument("image")
    rec.add_argument("--config")
    rec.add_argument("--json", action="store_true")

    compose = sub.add_parser("compose", help="stage 3a: classify lines and build the utterance")
    compose.add_argument("--line", action="append", required=True, help="one text line; repeatable")
    compose.add_argument("--direction", choices=[d.value for d in Direction])
    compose.add_argument("--language", help="output language tag (en/hi/as); default follows the script")
    compose.add_argument("--json", action="store_true")

    speak = sub.add_parser("speak", help="stage 3b: synthesize text to a WAV file")
    speak.add_argument("--text", required=True)
    speak.add_argument("--out", required=True)
    speak.add_argument("--language", default="en")
    speak.add_argument("--rate-wpm", type=int, default=None)
    speak.add_argument("--config")
    speak.add_argument("--json", action="store_true")

    pipe = sub.add_parser("pipeline", help="full image-to-speech run")
    pipe.add_argument("image")
    pipe.add_argument("--config")
    pipe.add_argument("--out-dir")
    pipe.add_argument("--direction", choices=[d.value for d in Direction], help="category-2 annotation")
    pipe.add_argument("--lenient", action="store_true", help="exit 0 even when a stage fails")
    pipe.add_argument("--json", action="store_true")

    ev = sub.add_parser("eval", help="benchmark OCR backends over a corpus")
    ev.add_argument("--corpus", required=True, help="manifest path")
    ev.add_argument("--backends", required=True, help="backend spec file (JSON/TOML with a 'backends' list)")
    ev.add_argument("--out", required=True, help="report output path")
    ev.add_argument("--format", choices=["json", "text_table"], default="json")
    ev.add_argument("--config")
    ev.add_argument("--json", action="store_true", help="also print the report to stdout as JSON")

    return parser


def _cmd_corpus_validate(args) -> int:
    corpus = load_manifest(args.manifest)
    for warning in corpus.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    root = args.image_root or str(Path(args.manifest).parent)
    report = validate_corpus(corpus, root)
    text_lines = [f"records: {len(corpus)}", f"ok: {report.ok}"]
    text_lines += [f"  {f.record_id}: {f.kind}: {f.detail}" for f in report.findings]
    _emit(report.to_dict(), args.json, "\n".join(text_lines))
    return 0 if report.ok else 1


def _cmd_corpus_stats(args) -> int:
    corpus = load_manifest(args.manifest)
    stats = corpus_stats(corpus)
    payload = stats.to_dict()
    lines = [f"total: {payload['total']}"]
    for section in ("per_category", "per_language", "per_source"):
        lines.append(f"{section}:")
        for key, count in payload[section].items():
            lines.append(f"  {key}: {count}")
    _emit(payload, args.json, "\n".join(lines))
    return 0


def _cmd_corpus_synth(args) -> int:
    from .synthetic import build_synthetic_corpus

    noise_levels = tuple(args.noise) if args.noise else (0.0, 0.03)
    built = build_synthetic_corpus(args.out_dir, noise_levels=noise_levels, scale=args.scale, seed=args.seed)
    payload = {
        "manifest": str(built.manifest_path),
        "mini_manifest": str(built.mini_manifest_path),
        "records": len(built.corpus),
    }
    _emit(payload, args.json, f"wrote {payload['records']} records under {args.out_dir}\n"
          f"manifest: {payload['manifest']}\nmini manifest: {payload['mini_manifest']}")
    return 0


def _cmd_detect(args) -> int:
    cfg = _resolve_config(args.config)
    image = ensure_rgb(load_image(args.image))
    from .detector import detect_text_regions

    regions = detect_text_regions(image, cfg.detector)
    if args.out_dir:
        out = Path(args.out_dir) / "regions"
        out.mkdir(parents=True, exist_ok=True)
        for region in regions:
            save_image(image.crop(region.box), out / f"region_{region.line_index:02d}.png")
    payload = [
        {"box": r.box.to_list(), "line_index": r.line_index, "score": r.score}
        for r in regions
    ]
    text = "\n".join(f"line {r.line_index}: box={r.box.to_list()} score={r.score:.3f}" for r in regions)
    _emit(payload, args.json, text or "no regions")
    return 0


def _cmd_recognize(args) -> int:
    cfg = _resolve_config(args.config)
    image = ensure_rgb(load_image(args.image))
    from .detector import detect_text_regions

    regions = detect_text_regions(image, cfg.detector)
    backend = make_ocr_backend(cfg.ocr_backend)
    gray = to_grayscale(image)
    lines = []
    for region in regions:
        result = recognize(backend, gray.crop(region.box), RecognitionHints())
        lines.extend(line.to_dict() for line in result.lines)
    _emit(lines, args.json, "\n".join(line["text"] for line in lines) or "no text")
    return 0


def _cmd_compose(args) -> int:
    direction = _parse_direction(args.direction)
    language = _language_for_tag(args.language)
    category = classify_category(args.line, direction_hint=direction)
    message = parse_message(args.line, category, direction_hint=direction, language=language)
    utterance = verbalize(message, language=language)
    payload = {"category": category, "message": message.to_dict(), "utterance": utterance.to_dict()}
    _emit(payload, args.json, f"category {category}: {utterance.text}")
    return 0


def _cmd_speak(args) -> int:
    cfg = _resolve_config(args.config)
    language = _language_for_tag(args.language) or Language.ENGLISH
    rate = args.rate_wpm or cfg.rate_wpm
    utterance = make_utterance(args.text, language)
    backend = make_synth_backend(cfg.tts_backend)
    clip = synthesize(backend, utterance, SynthVoice(language=language.tag, rate_wpm=rate, sample_rate=cfg.sample_rate))
    write_wav(clip, args.out)
    payload = {
        "out": args.out,
        "duration_s": clip.duration,
        "estimated_s": estimate_duration(utterance, rate),
        "sample_rate": clip.sample_rate,
    }
    _emit(payload, args.json, f"wrote {args.out} ({clip.duration:.3f} s at {clip.sample_rate} Hz)")
    return 0


def _cmd_pipeline(args) -> int:
    cfg = _resolve_config(args.config)
    if args.out_dir:
        cfg = PipelineConfig.from_dict({**cfg.to_dict(), "out_dir": args.out_dir})
    result = run_pipeline(args.image, cfg, direction_hint=_parse_direction(args.direction))
    payload = result.to_dict()
    if not args.json:
        lines = [f"regions: {len(result.regions)}"]
        if result.recognized:
            lines += [f"  {line.text}" for line in result.recognized.lines]
        if result.utterance:
            lines.append(f"utterance: {result.utterance.text}")
        if result.wav_path:
            lines.append(f"wav: {result.wav_path} ({result.clip_duration:.3f} s)")
        if result.feasibility:
            lines.append(f"feasible: {result.feasibility['feasible']} (slack {result.feasibility['slack_s']:.3f} s)")
        for note in result.stage_notes:
            lines.append(f"stage failure: {note}")
        print("\n".join(lines))
    else:
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    if result.stage_notes and not args.lenient:
        return 2
    return 0


def _load_backend_specs(path: str) -> list[dict]:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        doc = tomllib.loads(text)
    else:
        doc = json.loads(text)
    specs = doc.get("backends")
    if not isinstance(specs, list) or not specs:
        raise PanelVoiceError(f"{path}: expected a nonempty 'backends' list")
    return specs


def _cmd_eval(args) -> int:
    cfg = _resolve_config(args.config)
    corpus = load_manifest(args.corpus)
    backends = [make_ocr_backend(spec) for spec in _load_backend_specs(args.backends)]
    reports = run_benchmark(
        corpus,
        backends,
        image_root=Path(args.corpus).parent,
        pipeline_cfg=cfg.detector,
        reference_speed_mps=cfg.speed_mps,
        distance_m=cfg.distance_m,
        tts_backend=make_synth_backend(cfg.tts_backend),
        voice=SynthVoice(rate_wpm=cfg.rate_wpm, sample_rate=cfg.sample_rate),
    )
    write_report(reports, args.out, format=args.format)
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], ensure_ascii=False, indent=2))
    else:
        print(format_report_table(reports))
    return 0


_HANDLERS = {
    ("corpus", "validate"): _cmd_corpus_validate,
    ("corpus", "stats"): _cmd_corpus_stats,
    ("corpus", "synth"): _cmd_corpus_synth,
    ("detect", None): _cmd_detect,
    ("recognize", None): _cmd_recognize,
    ("compose", None): _cmd_compose,
    ("speak", None): _cmd_speak,
    ("pipeline", None): _cmd_pipeline,
    ("eval", None): _cmd_eval,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = _HANDLERS[(args.command, getattr(args, "corpus_command", None))]
    try:
        return handler(args)
    except PanelVoiceError as exc:
        print(f"panelvoice: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"panelvoice: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
