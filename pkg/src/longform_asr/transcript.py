"""Transcript data model, its JSON file format and subtitle emitters.

Times are kept at millisecond precision in memory (``round(t, 3)``) so that
writing and re-reading a transcript reproduces it exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .alignment import AlignedWord
from .errors import InputError

FORMAT_VERSION = 1


def ms(t: float) -> float:
    return round(t, 3)


@dataclass
class TranscriptSegment:
    start_s: float
    end_s: float
    text: str
    words: list[AlignedWord] = field(default_factory=list)

    def __post_init__(self):
        self.start_s = ms(self.start_s)
        self.end_s = ms(self.end_s)
        self.words = [
            AlignedWord(w.word, ms(w.start_s), ms(w.end_s), round(w.score, 6), w.interpolated)
            for w in self.words
        ]


@dataclass
class Transcript:
    audio_id: str = ""
    segments: list[TranscriptSegment] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "audio_id": self.audio_id,
            "format_version": FORMAT_VERSION,
            "metadata": dict(sorted(self.metadata.items())),
            "segments": [
                {
                    "start_s": s.start_s,
                    "end_s": s.end_s,
                    "text": s.text,
                    "words": [
                        {
                            "word": w.word,
                            "start_s": w.start_s,
                            "end_s": w.end_s,
                            "score": w.score,
                            "interpolated": w.interpolated,
                        }
                        for w in s.words
                    ],
                }
                for s in self.segments
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Transcript":
        try:
            segments = [
                TranscriptSegment(
                    s["start_s"],
                    s["end_s"],
                    s["text"],
                    [
                        AlignedWord(w["word"], w["start_s"], w["end_s"], w["score"], w["interpolated"])
                        for w in s.get("words", [])
                    ],
                )
                for s in data["segments"]
            ]
            return cls(data.get("audio_id", ""), segments, dict(data.get("metadata", {})))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed transcript: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"{path}: {exc}") from None
        return cls.from_dict(data)


def _jsonable(value):
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    return str(value)


def config_hash(config: dict[str, Any]) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _clock(t: float, sep: str) -> str:
    total = int(round(t * 1000))
    h, rem = divmod(total, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, milli = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d}{sep}{milli:03d}"


def _cues(transcript: Transcript):
    for seg in transcript.segments:
        text = " ".join(seg.text.split())
        if text:
            yield seg.start_s, seg.end_s, text


def to_srt(transcript: Transcript) -> str:
    blocks = []
    for n, (start, end, text) in enumerate(_cues(transcript), start=1):
        blocks.append(f"{n}\n{_clock(start, ',')} --> {_clock(end, ',')}\n{text}\n")
    return "\n".join(blocks)


def to_vtt(transcript: Transcript) -> str:
    blocks = ["WEBVTT\n"]
    for start, end, text in _cues(transcript):
        blocks.append(f"{_clock(start, '.')} --> {_clock(end, '.')}\n{text}\n")
    return "\n".join(blocks)
