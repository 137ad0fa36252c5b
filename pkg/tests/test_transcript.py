import json
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from longform_asr.alignment import AlignedWord
from longform_asr.config import load_config, normalizer_config, parse_config, segmentation_config
from longform_asr.errors import InputError
from longform_asr.transcript import Transcript, TranscriptSegment, config_hash, to_srt, to_vtt


def sample():
    return Transcript(
        "clip",
        [
            TranscriptSegment(0.5, 2.0, "hello there", [
                AlignedWord("hello", 0.5, 1.1, 0.81234567, False),
                AlignedWord("there", 1.2, 1.9, 0.7, False),
            ]),
            TranscriptSegment(3661.0004, 3662.5, "ok"),
        ],
        {"pipeline_version": "0.1.0", "config_hash": "abc"},
    )


def test_json_round_trip(tmp_path):
    t = sample()
    path = tmp_path / "t.json"
    t.save(path)
    back = Transcript.load(path)
    assert back == t
    assert back.dumps() == path.read_text()


def test_json_layout_is_stable():
    data = json.loads(sample().dumps())
    assert list(data) == ["audio_id", "format_version", "metadata", "segments"]
    assert list(data["metadata"]) == ["config_hash", "pipeline_version"]
    assert data["segments"][1]["start_s"] == 3661.0
    assert data["segments"][0]["words"][0]["score"] == 0.812346


def test_load_rejects_garbage(tmp_path):
    p = tmp_path / "t.json"
    p.write_text("{not json")
    with pytest.raises(InputError):
        Transcript.load(p)


def test_srt_and_vtt():
    srt = to_srt(sample())
    assert srt.splitlines()[:3] == ["1", "00:00:00,500 --> 00:00:02,000", "hello there"]
    assert "01:01:01,000 --> 01:01:02,500" in srt
    vtt = to_vtt(sample())
    assert vtt.startswith("WEBVTT\n\n")
    assert "00:00:00.500 --> 00:00:02.000" in vtt


def test_subtitles_skip_empty_text():
    t = Transcript("x", [TranscriptSegment(0, 1, ""), TranscriptSegment(2, 3, "a")])
    assert to_srt(t) == "1\n00:00:02,000 --> 00:00:03,000\na\n"


CUE = re.compile(r"(\d\d):(\d\d):(\d\d)[,.](\d\d\d) --> (\d\d):(\d\d):(\d\d)[,.](\d\d\d)")


def cue_times(text):
    out = []
    for m in CUE.finditer(text):
        g = [int(x) for x in m.groups()]
        out.append((g[0] * 3600000 + g[1] * 60000 + g[2] * 1000 + g[3],
                    g[4] * 3600000 + g[5] * 60000 + g[6] * 1000 + g[7]))
    return out


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 50_000), st.integers(0, 50_000)), max_size=20))
def test_cues_monotone_and_match_segments(pieces):
    # pieces are (duration ms, gap ms) laid out back to back
    segs, t = [], 0
    for dur, gap in pieces:
        t += gap
        segs.append(TranscriptSegment(t / 1000, (t + dur) / 1000, "w"))
        t += dur
    tr = Transcript("x", segs)
    expected = [(round(s.start_s * 1000), round(s.end_s * 1000)) for s in segs]
    for text in (to_srt(tr), to_vtt(tr)):
        cues = cue_times(text)
        assert cues == expected
        for (a, b), (c, _) in zip(cues, cues[1:]):
            assert a < b <= c


def test_config_hash():
    a = config_hash({"onset": 0.5, "interjection_set": frozenset({"uh", "hmm"})})
    b = config_hash({"interjection_set": frozenset({"hmm", "uh"}), "onset": 0.5})
    assert a == b and re.fullmatch(r"[0-9a-f]+", a)
    assert a != config_hash({"onset": 0.6, "interjection_set": frozenset({"uh", "hmm"})})


def test_config_file(tmp_path):
    p = tmp_path / "run.conf"
    p.write_text("# comment\nonset = 0.6\nmax_chunk_s=20\nkeep_interjections=false\n"
                 "interjection_set=hmm, uh\nbatch_size=3\n")
    settings = load_config(p)
    assert segmentation_config(settings).onset == 0.6
    assert segmentation_config(settings).max_chunk_s == 20.0
    ncfg = normalizer_config(settings)
    assert ncfg.keep_interjections is False
    assert ncfg.interjection_set == frozenset({"hmm", "uh"})
    assert settings["batch_size"] == 3


@pytest.mark.parametrize("text", ["colour=red\n", "onset\n", "onset=high\n", "keep_interjections=maybe\n"])
def test_config_errors(text):
    with pytest.raises(InputError):
        parse_config(text)
