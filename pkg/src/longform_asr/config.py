"""``key=value`` config files covering segmentation and normalizer settings."""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Any

from .errors import InputError
from .normalize import NormalizerConfig
from .segmentation import SegmentationConfig

_FLOAT_KEYS = {f.name for f in dataclasses.fields(SegmentationConfig)} | {"frame_ms"}
_INT_KEYS = {"batch_size", "workers"}
_BOOL_KEYS = {"keep_interjections"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_config(text: str, source: str = "<config>") -> dict[str, Any]:
    """Typed settings from ``key=value`` lines; ``#`` starts a comment."""
    out: dict[str, Any] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise InputError(f"{source}:{n}: expected key=value")
        try:
            if key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key in _INT_KEYS:
                out[key] = int(value)
            elif key in _BOOL_KEYS:
                if value.lower() not in _TRUE | _FALSE:
                    raise ValueError(f"not a boolean: {value!r}")
                out[key] = value.lower() in _TRUE
            elif key == "interjection_set":
                out[key] = frozenset(w.strip().lower() for w in value.split(",") if w.strip())
            elif key == "glm_path":
                out[key] = value or None
            else:
                raise InputError(f"{source}:{n}: unknown key {key!r}")
        except ValueError as exc:
            raise InputError(f"{source}:{n}: {exc}") from None
    return out


def load_config(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None
    return parse_config(text, str(path))


def _pick(settings: dict[str, Any], cls) -> dict[str, Any]:
    names = {f.name for f in dataclasses.fields(cls)}
    return {k: v for k, v in settings.items() if k in names}


def segmentation_config(settings: dict[str, Any]) -> SegmentationConfig:
    return SegmentationConfig(**_pick(settings, SegmentationConfig))


def normalizer_config(settings: dict[str, Any]) -> NormalizerConfig:
    return NormalizerConfig(**_pick(settings, NormalizerConfig))
