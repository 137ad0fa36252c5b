import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from longform_asr.errors import InputError, MalformedRule
from longform_asr.normalize import (
    GlmRule,
    GlmRuleSet,
    NormalizerConfig,
    apply_glm,
    basic_clean,
    cardinal,
    filter_interjections,
    normalize,
    ordinal,
    parse_glm,
    parse_glm_lines,
    parse_spelled_numbers,
    verbalize_numbers,
)

KEEP = NormalizerConfig()
DROP = NormalizerConfig(keep_interjections=False)


# --- basic_clean ----------------------------------------------------------------


@pytest.mark.parametrize(
    "raw, clean",
    [
        ("Hello, World!", "hello world"),
        ("it's [noise] fine", "it's fine"),
        ("", ""),
        ("we’re (laughs) done", "we're done"),
        ("'quoted' word", "quoted word"),
        ("state-of-the-art", "state of the art"),
        ("Café  naïve\tStraße", "cafe naive strasse"),
        ("pi is 3.14. ok", "pi is 3.14 ok"),
        ("1,000,000 people", "1000000 people"),
        ("a, b", "a b"),
    ],
)
def test_basic_clean(raw, clean):
    assert basic_clean(raw) == clean


# --- interjections --------------------------------------------------------------


def test_interjections_kept_by_default():
    assert filter_interjections("hmm i see", KEEP) == "hmm i see"


def test_interjections_removed_on_request():
    assert filter_interjections("hmm i see", DROP) == "i see"


def test_interjections_whole_word_only():
    assert filter_interjections("hmmm i see", DROP) == "hmmm i see"


def test_interjection_config_validation():
    with pytest.raises(InputError):
        NormalizerConfig(interjection_set=frozenset({"Hmm"}))
    with pytest.raises(InputError):
        NormalizerConfig(interjection_set=frozenset())


# --- numbers --------------------------------------------------------------------


@pytest.mark.parametrize(
    "n, words",
    [
        (0, "zero"),
        (1, "one"),
        (13, "thirteen"),
        (21, "twenty one"),
        (100, "one hundred"),
        (105, "one hundred five"),
        (1999, "one thousand nine hundred ninety nine"),
        (1_000_001, "one million one"),
        (999_999_999_999, "nine hundred ninety nine billion nine hundred ninety nine million "
         "nine hundred ninety nine thousand nine hundred ninety nine"),
    ],
)
def test_cardinal_table(n, words):
    assert cardinal(n) == words


@pytest.mark.parametrize(
    "n, words",
    [(1, "first"), (2, "second"), (3, "third"), (5, "fifth"), (12, "twelfth"),
     (20, "twentieth"), (21, "twenty first"), (100, "one hundredth"), (4, "fourth")],
)
def test_ordinal_table(n, words):
    assert ordinal(n) == words


@pytest.mark.parametrize(
    "text, out",
    [
        ("1", "one"),
        ("21", "twenty one"),
        ("3.5", "three point five"),
        ("2nd", "second"),
        ("0.25", "zero point two five"),
        ("007", "zero zero seven"),
        ("1234567890123", "one two three four five six seven eight nine zero one two three"),
        ("mp3 player", "mp three player"),
        ("room 101 is 3rd", "room one hundred one is third"),
        ("no digits here", "no digits here"),
    ],
)
def test_verbalize_numbers(text, out):
    assert verbalize_numbers(text) == out


@pytest.mark.parametrize(
    "text, out",
    [
        ("twenty one cats", "21 cats"),
        ("one", "1"),
        ("hundred dollars", "hundred dollars"),
        ("one hundred five", "105"),
        ("twenty thirty", "twenty thirty"),
        ("one two", "one two"),
        ("zero", "0"),
        ("no one knows", "no 1 knows"),
        ("seven thousand and six", "7000 and 6"),
    ],
)
def test_parse_spelled_numbers(text, out):
    assert parse_spelled_numbers(text) == out


def test_cardinal_round_trip_sampled():
    # the exhaustive 0..999999 sweep lives in the acceptance suite
    for n in list(range(0, 2000)) + list(range(999_000, 1_000_000)):
        assert parse_spelled_numbers(verbalize_numbers(str(n))) == str(n)


# --- GLM ------------------------------------------------------------------------


def test_parse_glm_rules():
    rules = parse_glm_lines(
        [";; header", "", "gonna => going to", "ok => okay / o k ;; alt", "Wanna => Want To"]
    )
    assert set(rules.rules) == {
        GlmRule(("gonna",), ("going", "to")),
        GlmRule(("ok",), ("okay",)),
        GlmRule(("wanna",), ("want", "to")),
    }


def test_parse_glm_comment_only():
    assert len(parse_glm_lines([";; header"])) == 0


def test_parse_glm_malformed(tmp_path):
    p = tmp_path / "bad.glm"
    p.write_text(";; ok\ngonna going to\n")
    with pytest.raises(MalformedRule) as err:
        parse_glm(p)
    assert err.value.line_no == 2


def test_apply_glm_single_pass():
    rules = parse_glm_lines(["gonna => going to"])
    assert apply_glm("gonna go", rules) == "going to go"


def test_apply_glm_identity():
    assert apply_glm("a b c", GlmRuleSet()) == "a b c"


def test_apply_glm_longest_match():
    rules = GlmRuleSet((GlmRule(("a",), ("y",)), GlmRule(("a", "b"), ("x",))))
    assert apply_glm("a b", rules) == "x"
    assert apply_glm("a c", rules) == "y c"


def test_apply_glm_no_rescan_and_case_insensitive():
    rules = parse_glm_lines(["a => a b", "a b => z"])
    assert apply_glm("A", rules) == "a b"
    assert apply_glm("A B", rules) == "z"


# --- pipeline -------------------------------------------------------------------


@pytest.mark.parametrize(
    "raw, out",
    [
        ("I have 1 cat.", "i have one cat"),
        ("Twenty-one!", "twenty one"),
        ("", ""),
        ("Hmm, OK. I saw 2 of them on the 3rd.", "hmm ok i saw two of them on the third"),
        ("twelve hundred", "twelve hundred"),
    ],
)
def test_normalize(raw, out):
    assert normalize(raw) == out


def test_normalize_with_glm(tmp_path):
    glm = tmp_path / "en.glm"
    glm.write_text("gonna => going to\nok => okay\n")
    cfg = NormalizerConfig(glm_path=str(glm))
    assert normalize("OK, I'm gonna go.", cfg) == "okay i'm going to go"


def test_normalize_interjection_survives_default():
    assert "hmm" in normalize("Hmm... (cough) right").split()


pieces = st.sampled_from(
    list("abcxyz019 .,'-’![]()hmHMé")
    + ["twenty ", "one ", "hundred ", "thousand ", "3rd ", "hmm ", "oh "]
)
texts = st.lists(pieces, max_size=25).map("".join)


@settings(max_examples=500, deadline=None)
@given(texts)
def test_normalize_idempotent_and_total(text):
    once = normalize(text)
    assert normalize(once) == once
    assert re.fullmatch(r"[a-z' ]*", once)
    kept = [w for w in basic_clean(text).split() if w in KEEP.interjection_set]
    for w in kept:
        assert w in once.split()
