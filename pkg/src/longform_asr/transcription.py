"""Batched chunk transcription over pluggable ASR backends.

A backend is anything with a ``name``, a ``concurrent_safe`` flag and a
``transcribe(batch)`` method mapping a list of :class:`ChunkRef` to one raw
text per chunk. Two backends ship here: a manifest-driven fixture backend
and a bridge that runs an external command per batch.
"""

from __future__ import annotations

import logging
import re
import shlex
import subprocess
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence

import numpy as np

from .audio import slice_samples, write_wav
from .errors import (
    BackendError,
    BackendFailure,
    InputError,
    LineCountMismatch,
    MalformedManifest,
    NonZeroExit,
    UnknownChunkIndex,
)
from .segmentation import AudioChunk
from .transcript import Transcript, TranscriptSegment

logger = logging.getLogger(__name__)

LIST_PLACEHOLDER = "{list}"


@dataclass(frozen=True)
class ChunkRef:
    """What a backend sees of a chunk: its index, time range and optional audio slice."""

    index: int
    start_s: float
    end_s: float
    samples: Optional[np.ndarray] = None
    sample_rate: Optional[int] = None


@dataclass(frozen=True)
class ChunkTranscript:
    chunk_index: int
    text: str
    language_tag: Optional[str] = None


class AsrBackend(Protocol):
    name: str
    concurrent_safe: bool

    def transcribe(self, batch: Sequence[ChunkRef]) -> list[str]:
        ...


def chunk_refs(chunks: Sequence[AudioChunk], samples=None, sample_rate=None) -> list[ChunkRef]:
    refs = []
    for c in chunks:
        audio = None
        if samples is not None:
            audio = slice_samples(samples, sample_rate, c.start_s, c.end_s)
        refs.append(ChunkRef(c.index, c.start_s, c.end_s, audio, sample_rate))
    return refs


def transcribe_chunks(
    chunks: Sequence[AudioChunk | ChunkRef],
    backend: AsrBackend,
    batch_size: int = 8,
    max_workers: int = 4,
) -> list[ChunkTranscript]:
    """Run ``backend`` over consecutive batches and collect results by chunk index.

    Batches run on a thread pool when the backend is ``concurrent_safe``.
    Any failing batch aborts the whole run with :class:`BackendFailure`; when
    several batches fail the one with the lowest chunk index is reported, so
    the error is schedule-independent too.
    """
    if batch_size < 1:
        raise InputError(f"batch_size must be >= 1, got {batch_size}")
    refs = [
        c if isinstance(c, ChunkRef) else ChunkRef(c.index, c.start_s, c.end_s) for c in chunks
    ]
    batches = [refs[i : i + batch_size] for i in range(0, len(refs), batch_size)]
    if not batches:
        return []

    def run(batch: list[ChunkRef]) -> list[str]:
        texts = list(backend.transcribe(batch))
        if len(texts) != len(batch):
            raise LineCountMismatch(len(batch), len(texts))
        return texts

    workers = max_workers if getattr(backend, "concurrent_safe", False) else 1
    results: list = [None] * len(batches)
    if workers <= 1 or len(batches) == 1:
        for i, batch in enumerate(batches):
            try:
                results[i] = run(batch)
            except BackendError as exc:
                raise BackendFailure(batch[0].index, str(exc)) from exc
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(batches))) as pool:
            futures = [pool.submit(run, b) for b in batches]
            failure = None
            for i, fut in enumerate(futures):
                try:
                    results[i] = fut.result()
                except BackendError as exc:
                    if failure is None:
                        failure = BackendFailure(batches[i][0].index, str(exc))
                        failure.__cause__ = exc
            if failure is not None:
                raise failure

    out = [
        ChunkTranscript(ref.index, text)
        for batch, texts in zip(batches, results)
        for ref, text in zip(batch, texts)
    ]
    out.sort(key=lambda ct: ct.chunk_index)
    return out


# ---------------------------------------------------------------------------
# fixture backend

_RANGE_KEY = re.compile(r"^(\d+(?:\.\d+)?)-(\d+(?:\.\d+)?)$")


class FixtureBackend:
    """Looks chunk texts up in a manifest keyed by chunk index or ``start-end`` range.

    Unmapped chunks transcribe to ``""`` and leave a record in ``warnings``.
    """

    name = "fixture"
    concurrent_safe = True

    def __init__(self, by_index: dict[int, str], by_range: dict[tuple[float, float], str]):
        self.by_index = by_index
        self.by_range = by_range
        self.warnings: list[tuple[int, str]] = []
        self._lock = threading.Lock()

    @classmethod
    def from_text(cls, text: str) -> "FixtureBackend":
        by_index: dict[int, str] = {}
        by_range: dict[tuple[float, float], str] = {}
        for n, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            key, sep, value = line.partition("\t")
            if not sep:
                raise MalformedManifest(n, "expected 'key<TAB>text'")
            key = key.strip()
            if key.isdigit():
                by_index[int(key)] = value
                continue
            m = _RANGE_KEY.match(key)
            if not m:
                raise MalformedManifest(n, f"bad key {key!r}")
            by_range[(round(float(m.group(1)), 3), round(float(m.group(2)), 3))] = value
        return cls(by_index, by_range)

    def lookup(self, ref: ChunkRef) -> str:
        if ref.index in self.by_index:
            return self.by_index[ref.index]
        key = (round(ref.start_s, 3), round(ref.end_s, 3))
        if key in self.by_range:
            return self.by_range[key]
        msg = f"no manifest entry for chunk {ref.index} ({ref.start_s:.3f}-{ref.end_s:.3f})"
        logger.warning(msg)
        with self._lock:
            self.warnings.append((ref.index, msg))
        return ""

    def transcribe(self, batch: Sequence[ChunkRef]) -> list[str]:
        return [self.lookup(ref) for ref in batch]


def fixture_backend(manifest: str | Path) -> FixtureBackend:
    try:
        text = Path(manifest).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{manifest}: {exc}") from None
    return FixtureBackend.from_text(text)


# ---------------------------------------------------------------------------
# external command backend


class CommandBackend:
    """Runs ``cmd_template`` once per batch.

    The template is split shell-style; ``{list}`` is replaced by a file
    holding one WAV path per chunk. The command must print exactly one
    UTF-8 line per path on stdout and exit 0.
    """

    name = "command"
    concurrent_safe = True

    def __init__(self, cmd_template: str, timeout: float | None = None):
        if LIST_PLACEHOLDER not in cmd_template:
            raise InputError(f"command template must contain {LIST_PLACEHOLDER}")
        self.argv = shlex.split(cmd_template)
        self.timeout = timeout

    def transcribe(self, batch: Sequence[ChunkRef]) -> list[str]:
        with tempfile.TemporaryDirectory(prefix="longform_asr_") as tmp:
            tmpdir = Path(tmp)
            paths = []
            for ref in batch:
                if ref.samples is None or ref.sample_rate is None:
                    raise InputError("command backend needs audio; pass the source WAV")
                wav = tmpdir / f"chunk_{ref.index:05d}.wav"
                write_wav(wav, ref.samples, ref.sample_rate)
                paths.append(str(wav))
            list_file = tmpdir / "inputs.lst"
            list_file.write_text("".join(p + "\n" for p in paths), encoding="utf-8")
            argv = [arg.replace(LIST_PLACEHOLDER, str(list_file)) for arg in self.argv]
            try:
                proc = subprocess.run(
                    argv, capture_output=True, timeout=self.timeout, check=False
                )
            except OSError as exc:
                raise BackendError(f"cannot run {argv[0]!r}: {exc}") from None
            except subprocess.TimeoutExpired:
                raise BackendError(f"command timed out after {self.timeout}s") from None
        if proc.returncode != 0:
            raise NonZeroExit(proc.returncode, proc.stderr.decode("utf-8", "replace"))
        lines = proc.stdout.decode("utf-8").splitlines()
        if len(lines) != len(batch):
            raise LineCountMismatch(len(batch), len(lines))
        return lines


def command_backend(cmd_template: str) -> CommandBackend:
    return CommandBackend(cmd_template)


def backend_from_spec(spec: str) -> AsrBackend:
    """Build a backend from ``fixture:<manifest>`` or ``command:<template>``."""
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise InputError(f"backend spec {spec!r} must be 'fixture:<path>' or 'command:<template>'")
    if kind == "fixture":
        return fixture_backend(arg)
    if kind == "command":
        return command_backend(arg)
    raise InputError(f"unknown backend kind {kind!r}")


# ---------------------------------------------------------------------------


def assemble_transcript(
    chunk_transcripts: Sequence[ChunkTranscript],
    chunks: Sequence[AudioChunk],
    audio_id: str = "",
) -> Transcript:
    """Attach absolute chunk times to raw texts, sorted by start time."""
    by_index = {c.index: c for c in chunks}
    segments = []
    for ct in chunk_transcripts:
        chunk = by_index.get(ct.chunk_index)
        if chunk is None:
            raise UnknownChunkIndex(f"no chunk with index {ct.chunk_index}")
        segments.append(TranscriptSegment(chunk.start_s, chunk.end_s, ct.text))
    segments.sort(key=lambda s: s.start_s)
    return Transcript(audio_id=audio_id, segments=segments)
