"""English transcript normalization for WER scoring.

The chain is: punctuation, case and diacritic cleaning (interjections kept by default),
spelled-number canonicalization, digit verbalization, then optional GLM
mapping. Output of :func:`normalize` without GLM rules only contains
``a-z``, apostrophes and single spaces.
"""

from __future__ import annotations

import functools
import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import InputError
from .glm import GlmRule, GlmRuleSet, apply_glm, parse_glm, parse_glm_lines
from .numbers import cardinal, ordinal, parse_spelled_numbers, verbalize_numbers

__all__ = [
    "DEFAULT_INTERJECTIONS",
    "GlmRule",
    "GlmRuleSet",
    "NormalizerConfig",
    "apply_glm",
    "basic_clean",
    "cardinal",
    "filter_interjections",
    "normalize",
    "ordinal",
    "parse_glm",
    "parse_glm_lines",
    "parse_spelled_numbers",
    "verbalize_numbers",
]

DEFAULT_INTERJECTIONS = frozenset({"hmm", "mm", "mhm", "mmm", "uh", "um", "oh", "ah"})


@dataclass(frozen=True)
class NormalizerConfig:
    keep_interjections: bool = True
    interjection_set: frozenset[str] = DEFAULT_INTERJECTIONS
    glm_path: Optional[str] = None

    def __post_init__(self):
        words = frozenset(self.interjection_set)
        if not words or any(not w or w != w.lower() or " " in w for w in words):
            raise InputError("interjection_set must be non-empty lowercase single words")
        object.__setattr__(self, "interjection_set", words)
        if self.glm_path is not None:
            object.__setattr__(self, "glm_path", str(self.glm_path))


# letters NFKD leaves alone
_LETTER_MAP = {
    "æ": "ae", "ø": "o", "ß": "ss", "ł": "l", "đ": "d", "ð": "d", "þ": "th",
    "œ": "oe", "ı": "i", "ŋ": "n",
}
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'", "`": "'"})
_HYPHENS = re.compile(r"[-‐‑‒–—―−]")
_BRACKETED = re.compile(r"\[[^\]]*\]|\([^)]*\)")
_DIGIT_GROUP_COMMA = re.compile(r"(?<=\d),(?=\d{3}(?!\d))")
_DISALLOWED = re.compile(r"[^a-z0-9'.]")
_LOOSE_APOSTROPHE = re.compile(r"(?<![a-z])'|'(?![a-z])")
_LOOSE_PERIOD = re.compile(r"(?<!\d)\.|\.(?!\d)")


def _strip_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(
        _LETTER_MAP.get(c, c) for c in decomposed if unicodedata.category(c) != "Mn"
    )


def basic_clean(text: str) -> str:
    """Lowercase, strip bracketed spans, diacritics and punctuation.

    Apostrophes survive only between letters and periods only between
    digits (decimals). Digit-group commas (``1,000``) are dropped.
    """
    text = text.translate(_APOSTROPHES).lower()
    # compatibility decomposition can surface new capitals (e.g. U+210C)
    text = _strip_diacritics(text).lower()
    text = _BRACKETED.sub(" ", text)
    text = _HYPHENS.sub(" ", text)
    text = _DIGIT_GROUP_COMMA.sub("", text)
    text = _DISALLOWED.sub(" ", text)
    text = _LOOSE_APOSTROPHE.sub(" ", text)
    text = _LOOSE_PERIOD.sub(" ", text)
    return " ".join(text.split())


def filter_interjections(text: str, cfg: NormalizerConfig) -> str:
    if cfg.keep_interjections:
        return text
    return " ".join(w for w in text.split() if w not in cfg.interjection_set)


@functools.lru_cache(maxsize=16)
def _load_rules(path: str, mtime_ns: int) -> GlmRuleSet:
    return parse_glm(path)


def glm_rules(cfg: NormalizerConfig) -> GlmRuleSet | None:
    if cfg.glm_path is None:
        return None
    try:
        mtime = Path(cfg.glm_path).stat().st_mtime_ns
    except OSError as exc:
        raise InputError(f"{cfg.glm_path}: {exc}") from None
    return _load_rules(cfg.glm_path, mtime)


def normalize(text: str, cfg: NormalizerConfig | None = None) -> str:
    cfg = cfg or NormalizerConfig()
    text = basic_clean(text)
    text = filter_interjections(text, cfg)
    text = parse_spelled_numbers(text)
    text = verbalize_numbers(text)
    rules = glm_rules(cfg)
    if rules is not None:
        text = apply_glm(text, rules)
    return " ".join(text.split())
