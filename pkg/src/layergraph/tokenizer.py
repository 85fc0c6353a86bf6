"""Rule-cascade tokenizer whose token spans line up with graph anchors.

Rules are numbered 1-5; at every scan position the highest-numbered rule
that matches wins, and among matches of that rule the longest one wins.

    1   any single non-space character
    2a  (ucca mode) ``\\w+[$]?``
    2b  (default mode) word pattern with inner hyphens, ``&``, ``/``,
        ``'S``-style clitics, inner dots and digits; plus the numbers
        ``\\d+-\\d+``, ``\\d+,\\d+`` and ``\\d+,\\d+,\\d+``
    3   ``--+``, ```+``, ``'+``, ``[.]+``, ``!+``
    4   ``n't``, ``'s``, ``'d``, ``'m``, ``'re``, ``'ve``, ``'ll``
    5   21 fixed contractions split into two tokens (``do|n't``, ``can|not``...)

``\\w`` is Python's Unicode word class (alphanumerics plus underscore).
Rule 4 clitics are matched case-sensitively; rule 5 words accept an
upper-case first letter ("Don't" -> "Do", "n't").
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# leading \w widened to a run; the plain \w alternative sits last so the
# three-character hyphen step is always tried first (greedy == longest here)
_WORD_RUN = r"\w(?:\w-[^-\s]|&|/|'S\w|'[A-RT-Z]|[.](?=.*\w)\w|\d|\w)*[$]?"
_WORD_LITERAL = r"\w(?:\w-[^-\s]|&|/|'S\w|'[A-RT-Z]|[.](?=.*\w)\w|\d)*[$]?"
_NUMBERS = (r"\d+-\d+", r"\d+,\d+", r"\d+,\d+,\d+")

_RULE_2A = [re.compile(r"\w+[$]?")]
_RULE_3 = [re.compile(p) for p in (r"--+", r"`+", r"'+", r"[.]+", r"!+")]
_RULE_4 = [re.compile(re.escape(p)) for p in ("n't", "'s", "'d", "'m", "'re", "'ve", "'ll")]

CONTRACTIONS = (
    ("would", "n't"), ("could", "n't"), ("ca", "n't"), ("is", "n't"),
    ("are", "n't"), ("ai", "n't"), ("was", "n't"), ("were", "n't"),
    ("do", "n't"), ("does", "n't"), ("did", "n't"), ("should", "n't"),
    ("have", "n't"), ("has", "n't"), ("had", "n't"), ("wo", "n't"),
    ("might", "n't"), ("need", "n't"), ("can", "not"), ("wan", "na"),
    ("got", "ta"),
)


def _contraction_pattern(head: str, tail: str) -> re.Pattern:
    first = f"[{head[0]}{head[0].upper()}]"
    return re.compile(f"({first}{re.escape(head[1:])})({re.escape(tail)})(?!\\w)")


_RULE_5 = [_contraction_pattern(h, t) for h, t in CONTRACTIONS]

MODES = ("default", "ucca")


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    start: int
    end: int


class Tokenizer:
    def __init__(self, mode: str = "default", rule2b_word_run: bool = True):
        if mode not in MODES:
            raise ValueError(f"unknown tokenizer mode {mode!r}")
        self.mode = mode
        if mode == "ucca":
            rule2 = _RULE_2A
        else:
            word = _WORD_RUN if rule2b_word_run else _WORD_LITERAL
            rule2 = [re.compile(word)] + [re.compile(p) for p in _NUMBERS]
        self._rules = [(4, _RULE_4), (3, _RULE_3), (2, rule2)]

    def _match_at(self, text: str, pos: int) -> list[tuple[int, int]]:
        for pattern in _RULE_5:
            m = pattern.match(text, pos)
            if m:
                return [m.span(1), m.span(2)]
        for _, patterns in self._rules:
            end = max((m.end() for p in patterns if (m := p.match(text, pos))), default=pos)
            if end > pos:
                return [(pos, end)]
        return [(pos, pos + 1)]

    def tokenize(self, text: str) -> list[Token]:
        tokens: list[Token] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            for start, end in self._match_at(text, pos):
                tokens.append(Token(len(tokens), text[start:end], start, end))
                pos = end
        return tokens


def tokenize(text: str, mode: str = "default", rule2b_word_run: bool = True) -> list[Token]:
    return Tokenizer(mode, rule2b_word_run).tokenize(text)
