"""Stage 3: utterance to WAV, plus the drive-past timing feasibility check.

The builtin synthesizer is a deterministic test-signal generator (one sine
segment per character), not speech; real deployments point the pipeline at
an external engine through the process contract::

    <cmd> --lang <tag> --text <utf8> --out <wav path>

Exit 0 plus a readable WAV at the output path is success. WAV output here is
always canonical 44-byte-header RIFF, PCM mono 16-bit little-endian.
"""

from __future__ import annotations

import math
import struct
import subprocess
import tempfile
import threading
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .composer import Utterance
from .errors import (
    AudioFormatError,
    BackendTimeout,
    BackendUnavailable,
    ConfigError,
    EmptyUtterance,
    NonPositiveSpeed,
)

DEFAULT_SAMPLE_RATE = 22050
DEFAULT_RATE_WPM = 150
DEFAULT_TIMEOUT_S = 30.0

_FADE_S = 0.005
_AMPLITUDE = 0.35


@dataclass(frozen=True)
class AudioClip:
    """Mono signed 16-bit PCM."""

    samples: np.ndarray = field(repr=False)
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        samples = np.ascontiguousarray(self.samples, dtype=np.int16)
        if samples.ndim != 1:
            raise ValueError("samples must be a 1-D int16 array")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class SynthVoice:
    language: str = "en"
    rate_wpm: int = DEFAULT_RATE_WPM
    sample_rate: int = DEFAULT_SAMPLE_RATE


@dataclass(frozen=True)
class TimingBudget:
    """Everything needed to decide whether speech finishes before the panel."""

    distance_m: float
    speed_mps: float
    processing_s: float
    speech_s: float

    def __post_init__(self):
        for name in ("distance_m", "speed_mps", "processing_s", "speech_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    slack_s: float

    def to_dict(self):
        return {"feasible": self.feasible, "slack_s": self.slack_s}


def estimate_duration(utt: Utterance | str, rate_wpm: int = DEFAULT_RATE_WPM) -> float:
    """60 * word_count / rate_wpm with a one-word floor."""
    if rate_wpm <= 0:
        raise ValueError("rate_wpm must be positive")
    text = utt.text if isinstance(utt, Utterance) else utt
    words = max(1, len(text.split()))
    return 60.0 * words / rate_wpm


def builtin_synthesize(
    utt: Utterance | str,
    rate_wpm: int = DEFAULT_RATE_WPM,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> AudioClip:
    """Character-per-tone test signal, byte-for-byte deterministic.

    Each character becomes a sine segment at 220 + 4*(codepoint % 256) Hz;
    segment lengths split the estimated duration evenly, with 5 ms linear
    fades at segment edges to kill clicks.
    """
    text = utt.text if isinstance(utt, Utterance) else utt
    total = int(round(estimate_duration(text, rate_wpm) * sample_rate))
    if not text:
        return AudioClip(np.zeros(total, dtype=np.int16), sample_rate)
    bounds = [round(i * total / len(text)) for i in range(len(text) + 1)]
    out = np.zeros(total, dtype=np.float64)
    fade_len = int(round(_FADE_S * sample_rate))
    for ch, start, end in zip(text, bounds, bounds[1:]):
        n = end - start
        if n <= 0:
            continue
        freq = 220.0 + 4.0 * (ord(ch) % 256)
        t = np.arange(n) / sample_rate
        seg = _AMPLITUDE * np.sin(2.0 * math.pi * freq * t)
        ramp = min(fade_len, n // 2)
        if ramp > 0:
            envelope = np.ones(n)
            envelope[:ramp] = np.arange(ramp) / ramp
            envelope[n - ramp :] = np.arange(ramp, 0, -1) / ramp
            seg = seg * envelope
        out[start:end] = seg
    samples = np.clip(np.rint(out * 32767.0), -32768, 32767).astype(np.int16)
    return AudioClip(samples, sample_rate)


class BuiltinSynthBackend:
    """Deterministic tone generator behind the backend interface."""

    kind = "builtin"

    def __init__(self, backend_id: str = "builtin"):
        self.id = backend_id

    def synthesize(self, utt: Utterance, voice: SynthVoice) -> AudioClip:
        return builtin_synthesize(utt, rate_wpm=voice.rate_wpm, sample_rate=voice.sample_rate)


@dataclass
class ProcessSynthBackend:
    """External synthesizer via the file-based process contract."""

    id: str
    cmd: tuple[str, ...]
    timeout: float = DEFAULT_TIMEOUT_S
    kind: str = field(default="external_process", init=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, init=False)

    def synthesize(self, utt: Utterance, voice: SynthVoice) -> AudioClip:
        with self._lock:
            with tempfile.TemporaryDirectory(prefix="panelvoice-tts-") as tmp:
                out_path = Path(tmp) / "utterance.wav"
                argv = [*self.cmd, "--lang", voice.language, "--text", utt.text, "--out", str(out_path)]
                try:
                    proc = subprocess.run(argv, capture_output=True, timeout=self.timeout, check=False)
                except subprocess.TimeoutExpired as exc:
                    raise BackendTimeout(f"backend {self.id!r} exceeded {self.timeout}s") from exc
                except OSError as exc:
                    raise BackendUnavailable(f"backend {self.id!r}: cannot launch {self.cmd[0]!r}: {exc}") from exc
                if proc.returncode != 0:
                    raise BackendUnavailable(
                        f"backend {self.id!r} exited {proc.returncode}: {proc.stderr.decode('utf-8', 'replace').strip()}"
                    )
                if not out_path.is_file():
                    raise BackendUnavailable(f"backend {self.id!r} wrote no WAV at {out_path}")
                return read_wav(out_path)


def synthesize(backend, utt: Utterance, voice: SynthVoice | None = None) -> AudioClip:
    """Synthesize a nonempty utterance through the given backend."""
    if not utt.text.strip():
        raise EmptyUtterance("utterance text is empty")
    return backend.synthesize(utt, voice or SynthVoice())


def make_synth_backend(spec: dict):
    kind = spec.get("kind")
    if kind in ("builtin", "builtin_synth"):
        return BuiltinSynthBackend(backend_id=spec.get("id", "builtin"))
    if kind == "external_process":
        cmd = spec.get("cmd")
        if not cmd:
            raise ConfigError("external_process synth backend needs a 'cmd' list")
        return ProcessSynthBackend(
            id=spec.get("id", Path(cmd[0]).name),
            cmd=tuple(str(c) for c in cmd),
            timeout=float(spec.get("timeout", DEFAULT_TIMEOUT_S)),
        )
    raise ConfigError(f"unknown synth backend kind: {kind!r}")


def check_feasibility(budget: TimingBudget) -> Feasibility:
    """slack = distance/speed - processing - speech; feasible iff slack >= 0."""
    if budget.speed_mps <= 0:
        raise NonPositiveSpeed(f"speed_mps must be positive, got {budget.speed_mps}")
    window = budget.distance_m / budget.speed_mps
    slack = window - budget.processing_s - budget.speech_s
    return Feasibility(feasible=slack >= 0, slack_s=slack)


def max_speed_for(distance_m: float, processing_s: float, speech_s: float) -> float:
    """The unique speed where slack is exactly zero."""
    denominator = processing_s + speech_s
    if denominator <= 0:
        raise ValueError("processing_s + speech_s must be positive")
    return distance_m / denominator


def write_wav(clip: AudioClip, path: str | Path) -> None:
    """Canonical RIFF/WAVE: 44-byte header, PCM mono 16-bit little-endian."""
    data = clip.samples.astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        clip.sample_rate,
        clip.sample_rate * 2,
        2,  # block align
        16,  # bits per sample
        b"data",
        len(data),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data)


def read_wav(path: str | Path) -> AudioClip:
    """Read a PCM WAV; only mono 16-bit is accepted."""
    try:
        with wave.open(str(path), "rb") as wav:
            if wav.getcomptype() != "NONE":
                raise AudioFormatError(f"{path}: compressed WAV not supported")
            if wav.getnchannels() != 1 or wav.getsampwidth() != 2:
                raise AudioFormatError(
                    f"{path}: need mono 16-bit, got {wav.getnchannels()}ch {8 * wav.getsampwidth()}-bit"
                )
            frames = wav.readframes(wav.getnframes())
            rate = wav.getframerate()
    except wave.Error as exc:
        raise AudioFormatError(f"{path}: not a readable WAV: {exc}") from exc
    return AudioClip(np.frombuffer(frames, dtype="<i2"), rate)
