"""VAD post-processing: hysteresis binarization and cut & merge chunk planning.

Frame probabilities come either from an external VAD (probability file) or
from the RMS-energy fallback in :func:`energy_vad`. Voice regions longer than
``max_chunk_s`` are cut recursively at their lowest-activity frame, and the
resulting pieces are packed greedily into transcription chunks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyAudio, InfeasibleCut, InputError, UnsortedInput

# Times are quantized to this many decimals when derived from frame indices,
# so that k * 0.02 prints as 0.6 and not 0.6000000000000001.
_TIME_DECIMALS = 9
_EPS = 1e-9


@dataclass(frozen=True)
class FrameProbSeries:
    frame_duration_s: float
    probs: tuple[float, ...]

    def __post_init__(self):
        if not self.frame_duration_s > 0:
            raise InputError(f"frame_duration_s must be > 0, got {self.frame_duration_s}")
        probs = tuple(float(p) for p in self.probs)
        for i, p in enumerate(probs):
            if not 0.0 <= p <= 1.0:
                raise InputError(f"probability {p} at frame {i} outside [0, 1]")
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def duration_s(self) -> float:
        return frame_time(len(self.probs), self.frame_duration_s)

    def frame_index(self, t: float) -> int:
        """Nearest frame boundary index for time ``t``."""
        return int(round(t / self.frame_duration_s))


@dataclass(frozen=True, order=True)
class VoiceSegment:
    start_s: float
    end_s: float

    def __post_init__(self):
        if not 0 <= self.start_s < self.end_s:
            raise InputError(f"invalid segment ({self.start_s}, {self.end_s})")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class AudioChunk:
    index: int
    start_s: float
    end_s: float
    segments: tuple[VoiceSegment, ...] = field(default_factory=tuple)

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class SegmentationConfig:
    onset: float = 0.5
    offset: float = 0.363
    min_on_s: float = 0.1
    min_off_s: float = 0.1
    max_chunk_s: float = 30.0
    min_cut_piece_s: float = 2.0

    def __post_init__(self):
        if not (0.0 <= self.offset <= self.onset <= 1.0):
            raise InputError("thresholds must satisfy 0 <= offset <= onset <= 1")
        if self.min_on_s < 0 or self.min_off_s < 0:
            raise InputError("min_on_s and min_off_s must be non-negative")
        if not 0 < self.min_cut_piece_s < self.max_chunk_s:
            raise InputError("require 0 < min_cut_piece_s < max_chunk_s")


def frame_time(index: int, frame_duration_s: float) -> float:
    return round(index * frame_duration_s, _TIME_DECIMALS)


def energy_vad(samples, sample_rate: int, frame_ms: float = 20.0) -> FrameProbSeries:
    """Frame-level speech probability from RMS energy.

    Each non-overlapping frame gets ``RMS / p95`` clamped to [0, 1], where p95
    is the 95th percentile of frame RMS values over the file. A trailing
    partial frame is scored over the samples it has.
    """
    if sample_rate <= 0 or frame_ms <= 0:
        raise InputError("sample_rate and frame_ms must be positive")
    x = np.asarray(samples, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise EmptyAudio("no samples")
    frame_len = max(1, int(round(sample_rate * frame_ms / 1000.0)))
    n_frames = math.ceil(x.size / frame_len)
    padded = np.zeros(n_frames * frame_len)
    padded[: x.size] = x
    frames = padded.reshape(n_frames, frame_len)
    counts = np.full(n_frames, frame_len, dtype=np.float64)
    counts[-1] = x.size - (n_frames - 1) * frame_len
    rms = np.sqrt((frames**2).sum(axis=1) / counts)
    p95 = float(np.percentile(rms, 95))
    if p95 == 0.0:
        probs = np.zeros(n_frames)
    else:
        probs = np.clip(rms / p95, 0.0, 1.0)
    return FrameProbSeries(frame_len / sample_rate, tuple(probs.tolist()))


def _raw_regions(probs: Sequence[float], onset: float, offset: float) -> list[list[int]]:
    regions = []
    start = None
    for i, p in enumerate(probs):
        if start is None:
            if p >= onset:
                start = i
        elif p < offset:
            regions.append([start, i])
            start = None
    if start is not None:
        regions.append([start, len(probs)])
    return regions


def binarize(series: FrameProbSeries, cfg: SegmentationConfig) -> list[VoiceSegment]:
    """Hysteresis thresholding followed by gap filling and short-region removal.

    Gaps shorter than ``min_off_s`` are filled first, then regions shorter
    than ``min_on_s`` are dropped (the order pyannote's ``Binarize`` uses).
    """
    fd = series.frame_duration_s
    regions = _raw_regions(series.probs, cfg.onset, cfg.offset)

    merged: list[list[int]] = []
    for r in regions:
        if merged and (r[0] - merged[-1][1]) * fd < cfg.min_off_s - _EPS:
            merged[-1][1] = r[1]
        else:
            merged.append(r)

    return [
        VoiceSegment(frame_time(a, fd), frame_time(b, fd))
        for a, b in merged
        if (b - a) * fd >= cfg.min_on_s - _EPS
    ]


def _best_cut(lo: int, hi: int, series: FrameProbSeries, cfg: SegmentationConfig) -> int | None:
    """Frame index in (lo, hi) with minimal prob inside the guard band."""
    fd = series.frame_duration_s
    t_lo = lo * fd + cfg.min_cut_piece_s
    t_hi = hi * fd - cfg.min_cut_piece_s
    first = max(lo + 1, math.ceil(t_lo / fd - _EPS))
    last = min(hi - 1, math.floor(t_hi / fd + _EPS))
    if first > last:
        return None
    window = np.asarray(series.probs[first : last + 1])
    if window.size == 0:
        # segment extends past the probability series: cut at the guard edge
        return first
    # np.argmin returns the earliest index on ties
    return first + int(np.argmin(window))


def cut_segment(seg: VoiceSegment, series: FrameProbSeries, cfg: SegmentationConfig) -> list[VoiceSegment]:
    """Split ``seg`` at minimal-probability frames until every piece fits.

    Pieces partition the segment exactly. Splits never land closer than
    ``min_cut_piece_s`` to either end of the piece being split.
    """
    if cfg.max_chunk_s < 2 * cfg.min_cut_piece_s:
        raise InfeasibleCut(
            f"max_chunk_s={cfg.max_chunk_s} < 2 * min_cut_piece_s={cfg.min_cut_piece_s}"
        )
    if seg.duration_s <= cfg.max_chunk_s + _EPS:
        return [seg]

    fd = series.frame_duration_s
    # work on frame indices; only the original boundaries keep their exact value
    pieces: list[VoiceSegment] = []
    stack = [(seg.start_s, seg.end_s)]
    while stack:
        start, end = stack.pop()
        if end - start <= cfg.max_chunk_s + _EPS:
            pieces.append(VoiceSegment(start, end))
            continue
        lo, hi = series.frame_index(start), series.frame_index(end)
        cut = _best_cut(lo, hi, series, cfg)
        if cut is None:
            raise InfeasibleCut(f"no frame boundary to cut ({start}, {end}) at frame size {fd}")
        t = frame_time(cut, fd)
        # right half is pushed first so the left half is emitted first
        stack.append((t, end))
        stack.append((start, t))
    return pieces


def merge_segments(segments: Sequence[VoiceSegment], cfg: SegmentationConfig) -> list[AudioChunk]:
    """Greedy left-to-right packing of segments into chunks of at most ``max_chunk_s``."""
    for prev, cur in zip(segments, segments[1:]):
        if cur.start_s < prev.end_s:
            raise UnsortedInput(f"segment {cur} starts before {prev} ends")
    for seg in segments:
        if seg.duration_s > cfg.max_chunk_s + _EPS:
            raise InputError(f"segment {seg} longer than max_chunk_s; cut it first")

    groups: list[list[VoiceSegment]] = []
    for seg in segments:
        if groups and seg.end_s - groups[-1][0].start_s <= cfg.max_chunk_s + _EPS:
            groups[-1].append(seg)
        else:
            groups.append([seg])
    return [
        AudioChunk(i, g[0].start_s, g[-1].end_s, tuple(g)) for i, g in enumerate(groups)
    ]


def plan_chunks(series: FrameProbSeries, cfg: SegmentationConfig) -> list[AudioChunk]:
    pieces = []
    for seg in binarize(series, cfg):
        pieces.extend(cut_segment(seg, series, cfg))
    return merge_segments(pieces, cfg)


# ---------------------------------------------------------------------------
# file formats


def read_probs(path: str | Path) -> FrameProbSeries:
    """Parse a probability file: ``frame_duration_s=<float>`` then one value per line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise InputError(f"{path}: empty probability file")
    key, sep, value = lines[0].partition("=")
    if key.strip() != "frame_duration_s" or not sep:
        raise InputError(f"{path}:1: expected 'frame_duration_s=<float>'")
    try:
        fd = float(value)
    except ValueError:
        raise InputError(f"{path}:1: bad frame duration {value!r}") from None
    probs = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            probs.append(float(line))
        except ValueError:
            raise InputError(f"{path}:{n}: bad probability {line!r}") from None
    try:
        return FrameProbSeries(fd, tuple(probs))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_probs(series: FrameProbSeries, path: str | Path) -> None:
    out = [f"frame_duration_s={series.frame_duration_s!r}"]
    out.extend(f"{p:.6f}" for p in series.probs)
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def format_segments(segments: Iterable[VoiceSegment]) -> str:
    return "".join(f"{s.start_s:.3f}\t{s.end_s:.3f}\n" for s in segments)


def parse_segments(text: str) -> list[VoiceSegment]:
    segments = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"segment line {n}: expected 'start<TAB>end'")
        try:
            segments.append(VoiceSegment(float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise InputError(f"segment line {n}: {exc}") from None
    return segments


def chunks_to_dict(chunks: Sequence[AudioChunk]) -> dict:
    return {
        "chunks": [
            {
                "index": c.index,
                "start_s": round(c.start_s, 3),
                "end_s": round(c.end_s, 3),
                "segments": [[round(s.start_s, 3), round(s.end_s, 3)] for s in c.segments],
            }
            for c in chunks
        ]
    }


def chunks_from_dict(data: dict) -> list[AudioChunk]:
    try:
        return [
            AudioChunk(
                int(c["index"]),
                float(c["start_s"]),
                float(c["end_s"]),
                tuple(VoiceSegment(float(a), float(b)) for a, b in c["segments"]),
            )
            for c in data["chunks"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed chunk plan: {exc}") from None
