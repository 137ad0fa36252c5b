"""Acceptance suite: one test per criterion, summarized at the end of the run.

Run on its own with ``pytest tests/test_acceptance.py``; the terminal summary
prints a ``[PASS]`` / ``[FAIL]`` line for each criterion.
"""

import json
import random
import re
import string
import time

import numpy as np
import pytest

from longform_asr.alignment import ctc_viterbi, min_frames
from longform_asr.cli import main
from longform_asr.normalize import normalize, parse_spelled_numbers, verbalize_numbers
from longform_asr.scoring import edit_align
from longform_asr.segmentation import (
    FrameProbSeries,
    SegmentationConfig,
    binarize,
    cut_segment,
    plan_chunks,
)
from longform_asr.transcript import Transcript

from oracles import ctc_brute_force_best, ctc_collapse, edit_distance

SUITE_START = time.perf_counter()


def run_cli(*argv):
    return main([str(a) for a in argv])


# --- 1 ---------------------------------------------------------------------------


@pytest.mark.acceptance(1, "CTC Viterbi equals brute-force optimum on 1000 random instances, < 10 s")
def test_ctc_matches_brute_force():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    checked = infeasible = 0
    while checked < 1000:
        V = int(rng.integers(2, 5))
        T = int(rng.integers(1, 7))
        N = int(rng.integers(1, 4))
        tokens = [int(x) for x in rng.integers(1, V, size=N)]
        x = rng.normal(size=(T, V)) * 2
        lp = x - np.log(np.exp(x).sum(axis=1, keepdims=True))
        if T < min_frames(tokens):
            # no valid path exists; the brute force agrees
            assert ctc_brute_force_best(lp, tokens) == -np.inf
            infeasible += 1
            continue
        path = ctc_viterbi(lp, tokens)
        assert path.score == ctc_brute_force_best(lp, tokens)
        assert ctc_collapse(path.labels.tolist()) == tuple(tokens)
        checked += 1
    elapsed = time.perf_counter() - start
    print(f"ctc: {checked} feasible + {infeasible} infeasible instances in {elapsed:.2f}s")
    assert elapsed < 10.0


# --- 2 ---------------------------------------------------------------------------


@pytest.mark.acceptance(2, "WER DP equals recursive edit distance on 1000 random pairs; count identities hold")
def test_wer_matches_recursive_edit_distance():
    rng = random.Random(99)
    vocab = ["a", "b", "c", "d"]
    for _ in range(1000):
        ref = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
        hyp = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
        counts, _ = edit_align(ref, hyp)
        assert counts.substitutions + counts.deletions + counts.insertions == edit_distance(ref, hyp)
        assert counts.hits + counts.substitutions + counts.deletions == len(ref)
        assert counts.hits + counts.substitutions + counts.insertions == len(hyp)


# --- 3 ---------------------------------------------------------------------------


def random_series(rng):
    """Runs of similar probability; long enough to force cuts fairly often."""
    fd = float(rng.choice([0.02, 0.05, 0.1, 0.25]))
    probs = []
    target = int(rng.integers(0, 2500))
    while len(probs) < target:
        level = float(rng.choice([0.05, 0.3, 0.45, 0.7, 0.95]))
        run = int(rng.integers(1, 400))
        probs.extend(np.clip(level + rng.normal(0, 0.15, run), 0, 1).tolist())
    return FrameProbSeries(fd, tuple(probs[:target]))


def frames_of(segments, fd):
    out = []
    for s in segments:
        out.extend(range(round(s.start_s / fd), round(s.end_s / fd)))
    return out


@pytest.mark.acceptance(3, "segmentation properties on 500 random series")
def test_segmentation_properties():
    rng = np.random.default_rng(3)
    cut_count = 0
    for _ in range(500):
        series = random_series(rng)
        max_chunk = float(rng.choice([5.0, 10.0, 30.0]))
        cfg = SegmentationConfig(max_chunk_s=max_chunk, min_cut_piece_s=float(rng.choice([0.5, 1.0, 2.0])))
        fd = series.frame_duration_s
        voiced = binarize(series, cfg)
        pieces = []
        for v in voiced:
            cut = cut_segment(v, series, cfg)
            cut_count += len(cut) > 1
            assert cut[0].start_s == v.start_s and cut[-1].end_s == v.end_s
            assert all(a.end_s == b.start_s for a, b in zip(cut, cut[1:]))
            pieces.extend(cut)
        chunks = plan_chunks(series, cfg)
        assert chunks == plan_chunks(series, cfg)
        for c in chunks:
            assert c.end_s - c.start_s <= max_chunk + 1e-9
        inside = [seg for c in chunks for seg in c.segments]
        assert inside == pieces
        covered = frames_of(inside, fd)
        assert len(covered) == len(set(covered))
        assert sorted(covered) == sorted(frames_of(voiced, fd))
    # the generator must actually exercise the cutter
    assert cut_count > 50


# --- 4 ---------------------------------------------------------------------------


def random_text(rng):
    pieces = list(string.ascii_letters + string.digits + " .,'-!?()[]") + [
        "hmm ", "oh ", "twenty ", "one ", "hundred ", "thousand ", "3rd ", "1,000 ", "2.5 ", "é", "’",
    ]
    return "".join(rng.choice(pieces) for _ in range(rng.randint(0, 40)))


@pytest.mark.acceptance(4, "normalizer goldens, cardinal round-trip 0..999999, idempotence on 10k strings")
def test_normalizer():
    assert normalize("I have 1 cat.") == "i have one cat"
    assert normalize("Hmm, yes.") == "hmm yes"
    for n in range(1_000_000):
        if parse_spelled_numbers(verbalize_numbers(str(n))) != str(n):
            pytest.fail(f"round trip broke at {n}")
    rng = random.Random(4)
    for _ in range(10_000):
        once = normalize(random_text(rng))
        assert normalize(once) == once


# --- 5 ---------------------------------------------------------------------------


@pytest.mark.acceptance(5, "score --before-after on the bundled corpus: before > 0, after exactly 0.0")
def test_before_after_demonstration(corpus_dir, capsys):
    assert run_cli("score", "--dir", corpus_dir, "--before-after") == 0
    out = capsys.readouterr().out
    print(out)
    row = out.splitlines()[-1].split()
    assert row[0] == "Corpus"
    assert float(row[1]) > 0.0
    assert row[2] == "0.0"
    for line in out.splitlines():
        if re.match(r"f\d\d ", line):
            assert line.split()[-1] == "0.0"


# --- 6 ---------------------------------------------------------------------------


def pipeline_run(inputs, out_dir, *extra):
    out_dir.mkdir(parents=True, exist_ok=True)
    code = run_cli(
        "pipeline", "--probs", inputs["probs"], "--backend", f"fixture:{inputs['manifest']}",
        "--emissions", inputs["emissions"], "-o", out_dir / "transcript.json",
        "--srt", out_dir / "transcript.srt", "--vtt", out_dir / "transcript.vtt", *extra,
    )
    assert code == 0
    return {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}


@pytest.mark.acceptance(6, "pipeline output byte-identical for batch sizes 1, 3 and 8")
def test_batch_invariance(pipeline_inputs, tmp_path):
    runs = [pipeline_run(pipeline_inputs, tmp_path / f"b{b}", "--batch-size", b) for b in (1, 3, 8)]
    assert len(Transcript.from_dict(json.loads(runs[0]["transcript.json"])).segments) >= 8
    assert runs[0] == runs[1] == runs[2]


# --- 7 ---------------------------------------------------------------------------


def run_and_score(inputs, out_dir):
    files = pipeline_run(inputs, out_dir)
    transcript = Transcript.load(out_dir / "transcript.json")
    hyps = out_dir.parent / f"{out_dir.name}-hyps"
    hyps.mkdir()
    lines = []
    for i, seg in enumerate(transcript.segments):
        (hyps / f"chunk{i:02d}.txt").write_text(seg.text + "\n", encoding="utf-8")
        lines.append(f"chunk{i:02d}\t{inputs['refs'] / f'chunk{i:02d}.txt'}\t{hyps / f'chunk{i:02d}.txt'}\n")
    pairs = hyps / "pairs.tsv"
    pairs.write_text("".join(lines), encoding="utf-8")
    report = out_dir.parent / f"{out_dir.name}-report.json"
    table = out_dir.parent / f"{out_dir.name}-report.txt"
    assert run_cli("score", "--pairs", pairs, "--before-after", "--report", report, "-o", table) == 0
    files["report.json"] = report.read_bytes()
    files["report.txt"] = table.read_bytes()
    return files


@pytest.mark.acceptance(7, "two pipeline runs give byte-identical transcript, SRT and report; suite < 60 s")
def test_end_to_end_determinism(pipeline_inputs, tmp_path):
    first = run_and_score(pipeline_inputs, tmp_path / "run1")
    second = run_and_score(pipeline_inputs, tmp_path / "run2")
    assert set(first) >= {"transcript.json", "transcript.srt", "report.json"}
    assert first == second
    elapsed = time.perf_counter() - SUITE_START
    print(f"acceptance suite elapsed: {elapsed:.1f}s")
    assert elapsed < 60.0
