"""Exception types shared across the pipeline."""


class PanelVoiceError(Exception):
    """Base class for all errors raised by this package."""


# --- corpus / manifest ---

class ManifestError(PanelVoiceError):
    """Manifest file is malformed or violates the schema."""


class DuplicateIdError(ManifestError):
    """Two records in a manifest share the same id."""


class InvalidCategoryError(ManifestError):
    """Record category outside 1..4."""


# --- image handling ---

class ImageDecodeError(PanelVoiceError):
    """Image file could not be decoded."""


# --- OCR / TTS backends ---

class BackendUnavailable(PanelVoiceError):
    """Backend process/service could not be launched or returned failure."""


class BackendTimeout(PanelVoiceError):
    """Backend did not finish within the configured wall-clock timeout."""


class AudioFormatError(PanelVoiceError):
    """External synthesizer produced a WAV this pipeline cannot consume."""


# --- composing ---

class EmptyInputError(PanelVoiceError):
    """No text lines to classify."""


class ParseFailure(PanelVoiceError):
    """Lines do not parse under the rules of the requested category."""


class MissingDirection(PanelVoiceError):
    """Category-2 message requested without a direction annotation."""


class UnsupportedLanguage(PanelVoiceError):
    """No template table for the requested output language."""


# --- speech ---

class EmptyUtterance(PanelVoiceError):
    """Synthesis requested for an empty utterance."""


class NonPositiveSpeed(PanelVoiceError):
    """Feasibility query with speed <= 0."""


# --- evaluation ---

class EmptyReference(PanelVoiceError):
    """Error-rate computation against an empty reference."""


# --- configuration ---

class ConfigError(PanelVoiceError):
    """Pipeline configuration file is malformed or inconsistent."""
