"""Global mapping (GLM) rules in a simplified Kaldi/NIST line format.

Each rule line reads ``lhs => rhs1 / rhs2 ... ;; comment``. Only the first
alternative is used and context fields are not supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..errors import InputError, MalformedRule


@dataclass(frozen=True)
class GlmRule:
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]


@dataclass(frozen=True)
class GlmRuleSet:
    rules: tuple[GlmRule, ...] = ()

    def __post_init__(self):
        # stable sort keeps file order among rules of equal length
        ordered = tuple(sorted(self.rules, key=lambda r: -len(r.lhs)))
        object.__setattr__(self, "rules", ordered)
        by_first: dict[str, list[GlmRule]] = {}
        for rule in ordered:
            by_first.setdefault(rule.lhs[0], []).append(rule)
        object.__setattr__(self, "_by_first", by_first)

    def __len__(self) -> int:
        return len(self.rules)

    def candidates(self, token: str) -> list[GlmRule]:
        return self._by_first.get(token, [])


def parse_glm_lines(lines: Iterable[str]) -> GlmRuleSet:
    rules = []
    for n, raw in enumerate(lines, start=1):
        line = raw.split(";;", 1)[0].strip()
        if not line:
            continue
        lhs, sep, rhs = line.partition("=>")
        if not sep:
            raise MalformedRule(n)
        lhs_tokens = tuple(lhs.lower().split())
        if not lhs_tokens:
            raise MalformedRule(n, "empty left-hand side")
        first_alt = rhs.split("/", 1)[0]
        rules.append(GlmRule(lhs_tokens, tuple(first_alt.lower().split())))
    return GlmRuleSet(tuple(rules))


def parse_glm(path: str | Path) -> GlmRuleSet:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return parse_glm_lines(text.splitlines())


def apply_glm(text: str, rules: GlmRuleSet) -> str:
    """Single left-to-right pass; the longest matching rule fires at each position.

    Replaced text is never re-scanned.
    """
    tokens = text.split()
    if not rules.rules:
        return " ".join(tokens)
    lowered = [t.lower() for t in tokens]
    out: list[str] = []
    i = 0
    while i < len(tokens):
        for rule in rules.candidates(lowered[i]):
            k = len(rule.lhs)
            if tuple(lowered[i : i + k]) == rule.lhs:
                out.extend(rule.rhs)
                i += k
                break
        else:
            out.append(tokens[i])
            i += 1
    return " ".join(out)
