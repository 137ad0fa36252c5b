"""Word error rate: Levenshtein alignment, corpus pooling and report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Optional, Sequence, Union

from .errors import DuplicateId, InputError
from .normalize import NormalizerConfig, normalize


@dataclass(frozen=True)
class EditCounts:
    hits: int = 0
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0

    @property
    def ref_len(self) -> int:
        return self.hits + self.substitutions + self.deletions

    @property
    def hyp_len(self) -> int:
        return self.hits + self.substitutions + self.insertions

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def __add__(self, other: "EditCounts") -> "EditCounts":
        return EditCounts(
            self.hits + other.hits,
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
        )

    def to_dict(self) -> dict[str, int]:
        return {
            "hits": self.hits,
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "ref_len": self.ref_len,
        }


@dataclass(frozen=True)
class UndefinedWer:
    """WER of an empty reference with insertions: no ratio exists."""

    insertions: int

    def __str__(self) -> str:
        return f"undefined (I={self.insertions})"


WerValue = Union[float, UndefinedWer]


@dataclass(frozen=True)
class AlignOp:
    kind: Literal["match", "sub", "del", "ins"]
    ref: Optional[str] = None
    hyp: Optional[str] = None


def edit_align(ref: Sequence[str], hyp: Sequence[str]) -> tuple[EditCounts, list[AlignOp]]:
    """Unit-cost Levenshtein alignment of two word sequences.

    Among minimal-cost alignments the backtrace prefers match, then
    substitution, then deletion, then insertion, which makes the op
    sequence unique.
    """
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        d[i][0] = i
    for j in range(1, m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        r = ref[i - 1]
        row, prev = d[i], d[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (r != hyp[j - 1])
            row[j] = min(diag, prev[j] + 1, row[j - 1] + 1)

    ops: list[AlignOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and d[i][j] == d[i - 1][j - 1]:
            ops.append(AlignOp("match", ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and ref[i - 1] != hyp[j - 1] and d[i][j] == d[i - 1][j - 1] + 1:
            ops.append(AlignOp("sub", ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and d[i][j] == d[i - 1][j] + 1:
            ops.append(AlignOp("del", ref[i - 1], None))
            i -= 1
        else:
            ops.append(AlignOp("ins", None, hyp[j - 1]))
            j -= 1
    ops.reverse()

    kinds = [op.kind for op in ops]
    counts = EditCounts(
        kinds.count("match"), kinds.count("sub"), kinds.count("del"), kinds.count("ins")
    )
    return counts, ops


def wer(counts: EditCounts) -> WerValue:
    if counts.ref_len == 0:
        return 0.0 if counts.insertions == 0 else UndefinedWer(counts.insertions)
    return counts.errors / counts.ref_len


@dataclass(frozen=True)
class FileScore:
    file_id: str
    counts: EditCounts
    wer: WerValue
    ref: str = ""
    hyp: str = ""
    ops: tuple[AlignOp, ...] = ()


@dataclass(frozen=True)
class WerReport:
    per_file: tuple[FileScore, ...] = ()
    normalized: bool = False
    aggregate: EditCounts = field(init=False)

    def __post_init__(self):
        total = EditCounts()
        for f in self.per_file:
            total = total + f.counts
        object.__setattr__(self, "aggregate", total)

    @property
    def corpus_wer(self) -> WerValue:
        return wer(self.aggregate)

    @property
    def mean_file_wer(self) -> float | None:
        """Unweighted mean over files with a defined WER (reported, never tabled)."""
        values = [f.wer for f in self.per_file if not isinstance(f.wer, UndefinedWer)]
        return sum(values) / len(values) if values else None

    def to_dict(self) -> dict:
        def w(value: WerValue):
            if isinstance(value, UndefinedWer):
                return {"undefined": True, "insertions": value.insertions}
            return round(value, 6)

        return {
            "normalized": self.normalized,
            "aggregate": {
                "counts": self.aggregate.to_dict(),
                "wer": w(self.corpus_wer),
                "mean_file_wer": None if self.mean_file_wer is None else round(self.mean_file_wer, 6),
            },
            "per_file": [
                {"id": f.file_id, "counts": f.counts.to_dict(), "wer": w(f.wer)}
                for f in self.per_file
            ],
        }


def score_corpus(
    pairs: Iterable[tuple[str, str, str]],
    cfg: NormalizerConfig | None = None,
    normalize_refs: bool = True,
    normalize_hyps: bool = True,
) -> WerReport:
    """Score (id, reference, hypothesis) triples; corpus WER pools counts over files."""
    cfg = cfg or NormalizerConfig()
    seen: set[str] = set()
    scores = []
    for file_id, ref, hyp in pairs:
        if file_id in seen:
            raise DuplicateId(f"duplicate id {file_id!r}")
        seen.add(file_id)
        if normalize_refs:
            ref = normalize(ref, cfg)
        if normalize_hyps:
            hyp = normalize(hyp, cfg)
        counts, ops = edit_align(ref.split(), hyp.split())
        scores.append(FileScore(file_id, counts, wer(counts), ref, hyp, tuple(ops)))
    return WerReport(tuple(scores), normalized=normalize_refs or normalize_hyps)


def format_wer(value: WerValue) -> str:
    if isinstance(value, UndefinedWer):
        return f"undef(I={value.insertions})"
    return f"{100.0 * value:.1f}"


def render_report(
    report: WerReport,
    style: Literal["plain", "markdown"] = "plain",
    after: WerReport | None = None,
) -> str:
    """WER table in percent with one decimal, per-file rows plus a corpus row.

    With ``after`` the table has "Before normaliser" / "After normaliser"
    columns; files are matched by id.
    """
    if after is None:
        header = ["File", "WER"]
        rows = [[f.file_id, format_wer(f.wer)] for f in report.per_file]
        rows.append(["Corpus", format_wer(report.corpus_wer)])
    else:
        header = ["File", "Before normaliser", "After normaliser"]
        after_by_id = {f.file_id: f for f in after.per_file}
        rows = []
        for f in report.per_file:
            other = after_by_id.get(f.file_id)
            rows.append([f.file_id, format_wer(f.wer), format_wer(other.wer) if other else "-"])
        rows.append(["Corpus", format_wer(report.corpus_wer), format_wer(after.corpus_wer)])

    if style == "markdown":
        lines = ["| " + " | ".join(header) + " |"]
        lines.append("|" + "|".join(["---"] + ["---:"] * (len(header) - 1)) + "|")
        lines += ["| " + " | ".join(r) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    if style != "plain":
        raise InputError(f"unknown table style {style!r}")

    widths = [max(len(r[c]) for r in [header] + rows) for c in range(len(header))]

    def fmt(r):
        cells = [r[0].ljust(widths[0])] + [r[c].rjust(widths[c]) for c in range(1, len(r))]
        return "  ".join(cells).rstrip()

    rule = "-" * len(fmt(header))
    lines = [fmt(header), rule] + [fmt(r) for r in rows[:-1]] + [rule, fmt(rows[-1])]
    return "\n".join(lines) + "\n"


def diff_columns(ops: Sequence[AlignOp]) -> tuple[list[str], list[str]]:
    gt, pred = [], []
    for op in ops:
        if op.kind == "match":
            gt.append(op.ref)
            pred.append(op.hyp)
        elif op.kind == "sub":
            gt.append(f"*{op.ref}*")
            pred.append(f"*{op.hyp}*")
        elif op.kind == "del":
            gt.append(f"-{op.ref}-")
            pred.append("")
        else:
            gt.append("")
            pred.append(f"+{op.hyp}+")
    widths = [max(len(a), len(b)) for a, b in zip(gt, pred)]
    return [a.ljust(w) for a, w in zip(gt, widths)], [b.ljust(w) for b, w in zip(pred, widths)]


def render_diff(ref: str, hyp: str, ops: Sequence[AlignOp] | None = None) -> str:
    """Two aligned rows, ``GT:`` and ``PRED:``, with edit marks.

    Substitutions are ``*word*`` on both rows, deletions ``-word-`` on GT,
    insertions ``+word+`` on PRED.
    """
    if ops is None:
        _, ops = edit_align(ref.split(), hyp.split())
    gt, pred = diff_columns(ops)
    return f"GT:   {' '.join(gt)}".rstrip() + "\n" + f"PRED: {' '.join(pred)}".rstrip() + "\n"


def save_report(path: str | Path, report: WerReport, after: WerReport | None = None) -> None:
    data = {"report": report.to_dict()}
    if after is not None:
        data = {"before": report.to_dict(), "after": after.to_dict()}
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
