"""Command-line entry point: ``longform-asr <subcommand>``.

Exit codes: 0 success, 2 input/config error, 3 backend failure,
4 alignment infeasible.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .alignment import align_chunk, read_emissions
from .audio import load_wav
from .config import load_config, normalizer_config, segmentation_config
from .errors import AlignmentError, BackendFailure, InputError, LongformError
from .normalize import normalize
from .scoring import render_diff, render_report, save_report, score_corpus
from .segmentation import (
    binarize,
    chunks_from_dict,
    chunks_to_dict,
    energy_vad,
    format_segments,
    plan_chunks,
    read_probs,
)
from .transcript import Transcript, TranscriptSegment, config_hash, to_srt, to_vtt
from .transcription import (
    assemble_transcript,
    backend_from_spec,
    chunk_refs,
    transcribe_chunks,
)

logger = logging.getLogger("longform_asr")

EXIT_OK, EXIT_INPUT, EXIT_BACKEND, EXIT_ALIGN = 0, 2, 3, 4

# flag dest -> config key
_SEG_FLAGS = {
    "onset": "onset",
    "offset": "offset",
    "min_on": "min_on_s",
    "min_off": "min_off_s",
    "max_chunk": "max_chunk_s",
    "min_cut_piece": "min_cut_piece_s",
    "frame_ms": "frame_ms",
}


def emission_path(directory: Path, index: int) -> Path:
    return directory / f"{index}.emis"


# ---------------------------------------------------------------------------
# helpers


def _settings(args) -> dict[str, Any]:
    settings = load_config(args.config) if getattr(args, "config", None) else {}
    for dest, key in _SEG_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            settings[key] = value
    if getattr(args, "no_keep_interjections", False):
        settings["keep_interjections"] = False
    if getattr(args, "interjections", None):
        settings["interjection_set"] = frozenset(
            w.strip().lower() for w in args.interjections.split(",") if w.strip()
        )
    if getattr(args, "glm", None):
        settings["glm_path"] = args.glm
    for key in ("batch_size", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _load_source(args, settings):
    """(probs, samples, sample_rate) from --probs and/or --audio."""
    samples = sample_rate = None
    if args.audio:
        samples, sample_rate = load_wav(args.audio)
    if args.probs:
        probs = read_probs(args.probs)
    else:
        probs = energy_vad(samples, sample_rate, settings.get("frame_ms", 20.0))
    return probs, samples, sample_rate


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _align_transcript(transcript: Transcript, emissions_dir: str) -> None:
    directory = Path(emissions_dir)
    if not directory.is_dir():
        raise InputError(f"{directory}: not a directory")
    aligned = []
    for index, seg in enumerate(transcript.segments):
        emissions = read_emissions(emission_path(directory, index))
        duration = seg.end_s - seg.start_s
        covered = emissions.duration_s
        if covered > duration + 1e-6 or covered < duration - emissions.frame_duration_s - 1e-6:
            raise InputError(
                f"emissions for chunk {index} span {covered:.3f}s, chunk is {duration:.3f}s"
            )
        words = align_chunk(seg.text, emissions, seg.start_s)
        aligned.append(TranscriptSegment(seg.start_s, seg.end_s, seg.text, words))
    transcript.segments = aligned


# ---------------------------------------------------------------------------
# subcommands


def cmd_vad(args) -> int:
    settings = _settings(args)
    cfg = segmentation_config(settings)
    probs, _, _ = _load_source(args, settings)
    _write(args.output, format_segments(binarize(probs, cfg)))
    return EXIT_OK


def cmd_segment(args) -> int:
    settings = _settings(args)
    cfg = segmentation_config(settings)
    probs, _, _ = _load_source(args, settings)
    chunks = plan_chunks(probs, cfg)
    _write(args.output, json.dumps(chunks_to_dict(chunks), indent=2) + "\n")
    return EXIT_OK


def cmd_transcribe(args) -> int:
    settings = _settings(args)
    try:
        plan = json.loads(Path(args.chunks).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{args.chunks}: {exc}") from None
    chunks = chunks_from_dict(plan)
    samples = sample_rate = None
    if args.audio:
        samples, sample_rate = load_wav(args.audio)
    backend = backend_from_spec(args.backend)
    results = transcribe_chunks(
        chunk_refs(chunks, samples, sample_rate),
        backend,
        batch_size=settings.get("batch_size", 8),
        max_workers=settings.get("workers", 4),
    )
    transcript = assemble_transcript(results, chunks, audio_id=args.audio_id or "")
    _write(args.output, transcript.dumps())
    return EXIT_OK


def cmd_align(args) -> int:
    transcript = Transcript.load(args.transcript)
    _align_transcript(transcript, args.emissions)
    _write(args.output, transcript.dumps())
    return EXIT_OK


def cmd_normalize(args) -> int:
    cfg = normalizer_config(_settings(args))
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.input).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"{args.input}: {exc}") from None
    lines = [normalize(line, cfg) for line in text.splitlines()]
    _write(args.output, "".join(line + "\n" for line in lines))
    return EXIT_OK


def read_pairs(args) -> list[tuple[str, str, str]]:
    """(id, reference text, hypothesis text) from a pairs file or a directory."""
    pairs = []
    if args.pairs:
        base = Path(args.pairs).parent
        try:
            lines = Path(args.pairs).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise InputError(f"{args.pairs}: {exc}") from None
        entries = []
        for n, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise InputError(f"{args.pairs}:{n}: expected 'id<TAB>ref_path<TAB>hyp_path'")
            entries.append(parts)
        for file_id, ref, hyp in entries:
            pairs.append((file_id, _read_text(base / ref), _read_text(base / hyp)))
    else:
        directory = Path(args.dir)
        if not directory.is_dir():
            raise InputError(f"{directory}: not a directory")
        for ref in sorted(directory.glob("*.ref.txt")):
            file_id = ref.name[: -len(".ref.txt")]
            pairs.append((file_id, _read_text(ref), _read_text(directory / f"{file_id}.hyp.txt")))
    return pairs


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_score(args) -> int:
    cfg = normalizer_config(_settings(args))
    pairs = read_pairs(args)
    if args.before_after:
        before = score_corpus(pairs, cfg, normalize_refs=False, normalize_hyps=False)
        after = score_corpus(pairs, cfg)
        table = render_report(before, args.style, after=after)
        shown = after
    else:
        on = not args.no_normalize
        before, after = score_corpus(pairs, cfg, normalize_refs=on, normalize_hyps=on), None
        table = render_report(before, args.style)
        shown = before
    out = [table]
    if args.diff:
        for f in shown.per_file:
            out.append(f"\n== {f.file_id} ==\n" + render_diff(f.ref, f.hyp, f.ops))
    _write(args.output, "".join(out))
    if args.report:
        save_report(args.report, before, after)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    settings = _settings(args)
    cfg = segmentation_config(settings)
    probs, samples, sample_rate = _load_source(args, settings)
    chunks = plan_chunks(probs, cfg)
    backend = backend_from_spec(args.backend)
    results = transcribe_chunks(
        chunk_refs(chunks, samples, sample_rate),
        backend,
        batch_size=settings.get("batch_size", 8),
        max_workers=settings.get("workers", 4),
    )
    audio_id = args.audio_id or Path(args.audio or args.probs).stem
    transcript = assemble_transcript(results, chunks, audio_id=audio_id)
    if args.emissions:
        _align_transcript(transcript, args.emissions)
    # batch size and worker count never change the output, so they stay out of the hash
    hashed = {k: v for k, v in settings.items() if k not in ("batch_size", "workers")}
    hashed["backend"] = backend.name
    hashed["aligned"] = bool(args.emissions)
    transcript.metadata = {
        "config_hash": config_hash(hashed),
        "pipeline_version": __version__,
    }
    _write(args.output, transcript.dumps())
    if args.srt:
        Path(args.srt).write_text(to_srt(transcript), encoding="utf-8")
    if args.vtt:
        Path(args.vtt).write_text(to_vtt(transcript), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_source(p, required=True):
    g = p.add_argument_group("input")
    g.add_argument("--audio", help="WAV file (PCM16 or float32)")
    g.add_argument("--probs", help="frame-probability file from an external VAD")
    p.set_defaults(_source_required=required)


def _add_segmentation(p):
    g = p.add_argument_group("segmentation")
    g.add_argument("--onset", type=float)
    g.add_argument("--offset", type=float)
    g.add_argument("--min-on", type=float, help="drop regions shorter than this (s)")
    g.add_argument("--min-off", type=float, help="fill gaps shorter than this (s)")
    g.add_argument("--max-chunk", type=float, help="maximum chunk duration (s)")
    g.add_argument("--min-cut-piece", type=float, help="minimum piece left by a cut (s)")
    g.add_argument("--frame-ms", type=float, help="energy VAD frame size (ms)")


def _add_normalizer(p):
    g = p.add_argument_group("normalizer")
    g.add_argument("--no-keep-interjections", action="store_true")
    g.add_argument("--interjections", help="comma-separated interjection words")
    g.add_argument("--glm", help="global mapping file")


def _add_backend(p):
    p.add_argument("--backend", required=True, help="fixture:<manifest> or command:<template with {list}>")
    p.add_argument("--batch-size", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--audio-id")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="longform-asr",
        description="Long-form transcription: VAD chunking, batched ASR, word alignment, scoring.",
        epilog="exit codes: 0 ok, 2 input error, 3 backend failure, 4 alignment infeasible",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vad", help="binarize frame probabilities into voice segments")
    _add_source(p)
    _add_segmentation(p)
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_vad, _exclusive_source=True)

    p = sub.add_parser("segment", help="plan cut & merge transcription chunks")
    _add_source(p)
    _add_segmentation(p)
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_segment, _exclusive_source=True)

    p = sub.add_parser("transcribe", help="transcribe a chunk plan with a backend")
    p.add_argument("--chunks", required=True, help="chunk plan JSON from 'segment'")
    p.add_argument("--audio", help="source WAV (required by command backends)")
    _add_backend(p)
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_transcribe)

    p = sub.add_parser("align", help="add word timings to a transcript")
    p.add_argument("--transcript", required=True)
    p.add_argument("--emissions", required=True, help="directory of <chunk index>.emis files")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("normalize", help="normalize text, one line at a time")
    p.add_argument("input", nargs="?", help="input file (default: stdin)")
    _add_normalizer(p)
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("score", help="word error rate report")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pairs", help="file of 'id<TAB>ref_path<TAB>hyp_path' lines")
    src.add_argument("--dir", help="directory of <id>.ref.txt / <id>.hyp.txt files")
    p.add_argument("--before-after", action="store_true", help="score without and with normalization")
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--diff", action="store_true", help="print GT/PRED rows per file")
    p.add_argument("--style", choices=["plain", "markdown"], default="plain")
    p.add_argument("--report", help="write the structured JSON report here")
    _add_normalizer(p)
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("pipeline", help="segment, transcribe, align and write a transcript")
    _add_source(p)
    _add_segmentation(p)
    _add_backend(p)
    p.add_argument("--emissions", help="directory of <chunk index>.emis files")
    p.add_argument("--config")
    p.add_argument("-o", "--output")
    p.add_argument("--srt")
    p.add_argument("--vtt")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "_source_required", False):
        given = [x for x in (args.audio, args.probs) if x]
        if not given:
            parser.error("one of --audio or --probs is required")
        if getattr(args, "_exclusive_source", False) and len(given) > 1:
            parser.error("--audio and --probs are mutually exclusive here")
    try:
        return args.func(args)
    except BackendFailure as exc:
        print(f"error: backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except AlignmentError as exc:
        print(f"error: alignment: {exc}", file=sys.stderr)
        return EXIT_ALIGN
    except (LongformError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
