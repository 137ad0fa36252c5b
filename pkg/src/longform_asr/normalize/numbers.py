"""English cardinal/ordinal verbalization and its inverse for spelled numbers.

Cardinals are written with spaces only (``twenty one``, ``one hundred five``),
never hyphens or "and". The spelled-number parser accepts exactly these
canonical forms, which makes digit -> words -> digit a bijection on
0 .. 10**12 - 1.
"""

from __future__ import annotations

import re

UNITS = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen",
]
TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]
SCALES = [(10**9, "billion"), (10**6, "million"), (10**3, "thousand")]
MAX_CARDINAL = 10**12 - 1

_IRREGULAR_ORDINALS = {
    "zero": "zeroth",
    "one": "first",
    "two": "second",
    "three": "third",
    "five": "fifth",
    "eight": "eighth",
    "nine": "ninth",
    "twelve": "twelfth",
}

_WORD_VALUES = {w: i for i, w in enumerate(UNITS)}
_WORD_VALUES.update({w: 10 * i for i, w in enumerate(TENS) if w})
_SCALE_VALUES = {name: value for value, name in SCALES}
NUMBER_WORDS = frozenset(_WORD_VALUES) | {"hundred"} | frozenset(_SCALE_VALUES)

_INT_RE = re.compile(r"^\d+$")
_DECIMAL_RE = re.compile(r"^(\d+)\.(\d+)$")
_ORDINAL_RE = re.compile(r"^(\d+)(st|nd|rd|th)$")


def _below_thousand(n: int) -> list[str]:
    words = []
    hundreds, rest = divmod(n, 100)
    if hundreds:
        words += [UNITS[hundreds], "hundred"]
    if rest >= 20:
        words.append(TENS[rest // 10])
        if rest % 10:
            words.append(UNITS[rest % 10])
    elif rest:
        words.append(UNITS[rest])
    return words


def cardinal(n: int) -> str:
    if not 0 <= n <= MAX_CARDINAL:
        raise ValueError(f"{n} outside 0..{MAX_CARDINAL}")
    if n == 0:
        return "zero"
    words = []
    for value, name in SCALES:
        if n >= value:
            group, n = divmod(n, value)
            words += _below_thousand(group) + [name]
    words += _below_thousand(n)
    return " ".join(words)


def ordinal(n: int) -> str:
    words = cardinal(n).split()
    last = words[-1]
    if last in _IRREGULAR_ORDINALS:
        words[-1] = _IRREGULAR_ORDINALS[last]
    elif last.endswith("y"):
        words[-1] = last[:-1] + "ieth"
    else:
        words[-1] = last + "th"
    return " ".join(words)


def digit_words(digits: str) -> str:
    return " ".join(UNITS[int(d)] for d in digits)


def _integer_words(digits: str) -> str:
    # leading zeros and very long digit strings are read out digit by digit
    if len(digits) >= 13 or (len(digits) > 1 and digits[0] == "0"):
        return digit_words(digits)
    return cardinal(int(digits))


def verbalize_token(token: str) -> str:
    if not any(c.isdigit() for c in token):
        return token
    if _INT_RE.match(token):
        return _integer_words(token)
    m = _DECIMAL_RE.match(token)
    if m:
        return f"{_integer_words(m.group(1))} point {digit_words(m.group(2))}"
    m = _ORDINAL_RE.match(token)
    if m and len(m.group(1)) < 13 and not (len(m.group(1)) > 1 and m.group(1)[0] == "0"):
        return ordinal(int(m.group(1)))
    spelled = re.sub(r"\d", lambda d: f" {UNITS[int(d.group())]} ", token)
    return " ".join(re.sub(r"[^\w']|_", " ", spelled).split())


def verbalize_numbers(text: str) -> str:
    """Rewrite every whitespace token containing digits into words."""
    return " ".join(verbalize_token(tok) for tok in text.split())


def words_to_int(words: list[str]) -> int | None:
    """Value of a canonical cardinal word sequence, or None if it is not one."""
    total = 0
    current = 0
    for w in words:
        if w in _WORD_VALUES:
            current += _WORD_VALUES[w]
        elif w == "hundred":
            if current == 0:
                return None
            current *= 100
        elif w in _SCALE_VALUES:
            if current == 0:
                return None
            total += current * _SCALE_VALUES[w]
            current = 0
        else:
            return None
    value = total + current
    if value > MAX_CARDINAL or cardinal(value) != " ".join(words):
        return None
    return value


def parse_spelled_numbers(text: str) -> str:
    """Replace maximal runs of number words by digits when the run is a valid cardinal.

    Runs that are not a canonical cardinal (a bare "hundred", "twenty thirty",
    "one two") are left as they are.
    """
    tokens = text.split()
    out: list[str] = []
    i = 0
    while i < len(tokens):
        if tokens[i] not in NUMBER_WORDS:
            out.append(tokens[i])
            i += 1
            continue
        j = i
        while j < len(tokens) and tokens[j] in NUMBER_WORDS:
            j += 1
        run = tokens[i:j]
        value = words_to_int(run)
        out.extend(run if value is None else [str(value)])
        i = j
    return " ".join(out)
