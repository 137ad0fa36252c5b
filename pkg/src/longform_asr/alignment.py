"""CTC forced alignment of transcript characters to frame emissions.

The emission matrix holds per-frame log-probabilities over a character
vocabulary whose label 0 is the CTC blank and which contains a word
delimiter (``|`` in wav2vec2-style vocabularies). Alignment is a Viterbi
pass over the blank-interleaved target sequence; word timestamps are read
off the best path.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import AlignmentError, InfeasibleLength, InputError

BLANK = "<pad>"
DELIMITER = "|"
_TIME_DECIMALS = 6


@dataclass(frozen=True)
class LabelVocab:
    labels: tuple[str, ...]
    delimiter: str = DELIMITER

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise InputError("vocabulary needs at least a blank and one label")
        if len(set(labels)) != len(labels):
            raise InputError("vocabulary labels must be unique")
        if self.delimiter not in labels:
            raise InputError(f"vocabulary lacks the word delimiter {self.delimiter!r}")
        if labels.index(self.delimiter) == 0:
            raise InputError("label 0 is reserved for the blank")
        # lookups are case-insensitive; first occurrence wins
        index: dict[str, int] = {}
        for i, lab in enumerate(labels):
            index.setdefault(lab.lower(), i)
        object.__setattr__(self, "_index", index)

    @property
    def blank_id(self) -> int:
        return 0

    @property
    def delimiter_id(self) -> int:
        return self.labels.index(self.delimiter)

    def get(self, char: str) -> int | None:
        i = self._index.get(char)
        if i is None or i == 0 or i == self.delimiter_id:
            return None
        return i

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class EmissionMatrix:
    frames: np.ndarray
    frame_duration_s: float
    vocab: LabelVocab

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 2 or frames.shape[0] < 1:
            raise InputError("emission matrix must be T x V with T >= 1")
        if frames.shape[1] != len(self.vocab):
            raise InputError(
                f"emission matrix has {frames.shape[1]} columns, vocabulary has {len(self.vocab)}"
            )
        if not self.frame_duration_s > 0:
            raise InputError("frame_duration_s must be > 0")
        norms = logsumexp(frames, axis=1)
        bad = np.flatnonzero(~(np.abs(norms) <= 1e-3))
        if bad.size:
            raise InputError(f"frame {int(bad[0])} is not log-normalized (logsumexp={norms[bad[0]]:.4g})")

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def duration_s(self) -> float:
        return self.num_frames * self.frame_duration_s


@dataclass(frozen=True)
class AlignedWord:
    word: str
    start_s: float
    end_s: float
    score: float
    interpolated: bool = False


@dataclass(frozen=True)
class TokenizedWord:
    text: str
    labels: tuple[int, ...]

    @property
    def oov(self) -> bool:
        return not self.labels


@dataclass(frozen=True)
class CtcPath:
    """Best path: the extended-state index occupied at every frame."""

    states: np.ndarray
    tokens: tuple[int, ...]
    frame_log_probs: np.ndarray
    score: float

    @property
    def labels(self) -> np.ndarray:
        ext = extended_sequence(self.tokens)
        return ext[self.states]

    def token_positions(self) -> np.ndarray:
        """Target position emitted at each frame, -1 on blank frames."""
        return np.where(self.states % 2 == 1, (self.states - 1) // 2, -1)


def tokenize_for_alignment(text: str, vocab: LabelVocab) -> list[TokenizedWord]:
    """Split on whitespace, lowercase, drop characters the vocabulary lacks.

    Words left with no labels are kept as out-of-vocabulary so that they can
    still receive interpolated timestamps.
    """
    words = []
    for w in text.lower().split():
        ids = tuple(i for i in (vocab.get(c) for c in w) if i is not None)
        words.append(TokenizedWord(w, ids))
    return words


def flatten_words(
    words: Sequence[TokenizedWord], delimiter_id: int
) -> tuple[list[int], list[tuple[int, int] | None]]:
    """Flat target sequence with delimiters between words, plus each word's span.

    A delimiter stands between adjacent words and also at a chunk edge next
    to an out-of-vocabulary word, so every OOV word has at least one frame of
    room between its aligned neighbours. Consecutive delimiters collapse.
    """
    tokens: list[int] = []
    spans: list[tuple[int, int] | None] = []
    n = len(words)

    def delimit():
        if not tokens or tokens[-1] != delimiter_id:
            tokens.append(delimiter_id)

    for k, w in enumerate(words):
        if k > 0 or w.oov:
            delimit()
        if w.oov:
            spans.append(None)
            if k == n - 1:
                delimit()
            continue
        first = len(tokens)
        tokens.extend(w.labels)
        spans.append((first, len(tokens) - 1))
    return tokens, spans


def extended_sequence(tokens: Sequence[int], blank: int = 0) -> np.ndarray:
    ext = np.full(2 * len(tokens) + 1, blank, dtype=np.int64)
    ext[1::2] = np.asarray(tokens, dtype=np.int64)
    return ext


def min_frames(tokens: Sequence[int]) -> int:
    """Shortest CTC path: one frame per token plus a blank between equal neighbours."""
    return len(tokens) + sum(1 for a, b in zip(tokens, tokens[1:]) if a == b)


def ctc_viterbi(log_probs: np.ndarray, tokens: Sequence[int], blank: int = 0) -> CtcPath:
    lp = np.asarray(log_probs, dtype=np.float64)
    T = lp.shape[0]
    tokens = tuple(int(t) for t in tokens)
    required = min_frames(tokens)
    if T < required:
        raise InfeasibleLength(T, required)

    ext = extended_sequence(tokens, blank)
    S = ext.size
    # skipping a blank is allowed into a non-blank state whose label differs
    # from the one two states back
    can_skip = np.zeros(S, dtype=bool)
    can_skip[3::2] = ext[3::2] != ext[1:-2:2]

    dp = np.full(S, -np.inf)
    dp[0] = lp[0, ext[0]]
    if S > 1:
        dp[1] = lp[0, ext[1]]
    steps = np.zeros((T, S), dtype=np.int8)
    emit = lp[:, ext]
    two = np.full(S, -np.inf)
    one = np.full(S, -np.inf)
    for t in range(1, T):
        two[2:] = dp[:-2]
        two[~can_skip] = -np.inf
        one[1:] = dp[:-1]
        # rows ordered by predecessor index so argmax prefers the smaller state
        cand = np.stack((two, one, dp))
        choice = cand.argmax(axis=0)
        dp = cand[choice, np.arange(S)] + emit[t]
        steps[t] = 2 - choice

    finals = [S - 2, S - 1] if S > 1 else [0]
    end = max(finals, key=lambda s: (dp[s], -s))
    score = float(dp[end])
    if score == -np.inf:
        raise AlignmentError("no alignment path has non-zero probability")

    states = np.empty(T, dtype=np.int64)
    s = end
    for t in range(T - 1, -1, -1):
        states[t] = s
        s -= steps[t, s]
    frame_lp = emit[np.arange(T), states]
    return CtcPath(states, tokens, frame_lp, score)


def ctc_align(emissions: EmissionMatrix, tokens: Sequence[int]) -> CtcPath:
    """Viterbi CTC alignment of ``tokens`` against ``emissions``.

    Transitions are stay, advance one, or skip a blank between differing
    labels. Paths start in the leading blank or the first token and end in
    the last token or the trailing blank. Ties go to the smaller state index
    at every backtrack step, so the path is deterministic.
    """
    return ctc_viterbi(emissions.frames, tokens, emissions.vocab.blank_id)


def _t(x: float) -> float:
    return round(x, _TIME_DECIMALS)


def path_to_word_timings(
    path: CtcPath,
    words: Sequence[TokenizedWord],
    frame_duration_s: float,
    chunk_start_s: float,
    delimiter_id: int,
) -> list[AlignedWord]:
    """Read word spans off ``path``; ``words`` must be what produced its tokens."""
    tokens, spans = flatten_words(words, delimiter_id)
    if tuple(tokens) != path.tokens:
        raise AlignmentError("path was not aligned against these words")
    pos = path.token_positions()
    chunk_end = chunk_start_s + len(pos) * frame_duration_s

    timed: list[AlignedWord | None] = []
    for w, span in zip(words, spans):
        if span is None:
            timed.append(None)
            continue
        first, last = span
        frames = np.flatnonzero((pos >= first) & (pos <= last))
        start_f = int(np.flatnonzero(pos == first)[0])
        end_f = int(np.flatnonzero(pos == last)[-1]) + 1
        score = float(np.mean(np.exp(path.frame_log_probs[frames])))
        timed.append(
            AlignedWord(
                w.text,
                _t(chunk_start_s + start_f * frame_duration_s),
                _t(chunk_start_s + end_f * frame_duration_s),
                min(1.0, max(0.0, score)),
            )
        )

    # OOV runs share the gap between their aligned neighbours evenly
    out: list[AlignedWord] = []
    k = 0
    while k < len(words):
        if timed[k] is not None:
            out.append(timed[k])
            k += 1
            continue
        j = k
        while j < len(words) and timed[j] is None:
            j += 1
        left = out[-1].end_s if out else chunk_start_s
        right = timed[j].start_s if j < len(words) else chunk_end
        step = (right - left) / (j - k)
        for i in range(k, j):
            out.append(
                AlignedWord(
                    words[i].text,
                    _t(left + (i - k) * step),
                    _t(left + (i - k + 1) * step),
                    0.0,
                    interpolated=True,
                )
            )
        k = j
    return out


def align_chunk(
    text: str, emissions: EmissionMatrix, chunk_start_s: float = 0.0
) -> list[AlignedWord]:
    words = tokenize_for_alignment(text, emissions.vocab)
    if not words:
        return []
    delim = emissions.vocab.delimiter_id
    tokens, _ = flatten_words(words, delim)
    path = ctc_align(emissions, tokens)
    timed = path_to_word_timings(path, words, emissions.frame_duration_s, chunk_start_s, delim)
    return sorted(timed, key=lambda w: w.start_s)


# ---------------------------------------------------------------------------
# emission-matrix files


def read_emissions(path: str | Path) -> EmissionMatrix:
    """Parse ``frames=T labels=V frame_duration_s=F``, a label line, then T rows."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None
    if len(lines) < 2:
        raise InputError(f"{path}: missing header or label line")
    try:
        header = dict(item.split("=", 1) for item in lines[0].split())
        T = int(header["frames"])
        V = int(header["labels"])
        fd = float(header["frame_duration_s"])
    except (KeyError, ValueError):
        raise InputError(f"{path}:1: expected 'frames=T labels=V frame_duration_s=F'") from None
    labels = lines[1].split()
    if len(labels) != V:
        raise InputError(f"{path}:2: expected {V} labels, got {len(labels)}")
    if labels[0] != BLANK:
        raise InputError(f"{path}:2: first label must be {BLANK!r}")
    rows = [ln for ln in lines[2:] if ln.strip()]
    if len(rows) != T:
        raise InputError(f"{path}: expected {T} frame rows, got {len(rows)}")
    try:
        frames = np.array([[float(v) for v in ln.split()] for ln in rows], dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if frames.shape != (T, V):
        raise InputError(f"{path}: ragged emission rows")
    try:
        return EmissionMatrix(frames, fd, LabelVocab(tuple(labels)))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_emissions(emissions: EmissionMatrix, path: str | Path) -> None:
    T, V = emissions.frames.shape
    out = [f"frames={T} labels={V} frame_duration_s={emissions.frame_duration_s!r}"]
    out.append(" ".join(emissions.vocab.labels))
    for row in emissions.frames:
        out.append(" ".join(f"{v:.6f}" for v in row))
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
