"""Absolute and relative (edit-script) encodings of labels and property values.

A relative rule rebuilds each whitespace-separated word of a value from one
anchored token: the prefix script rewrites the first characters of the
token, the suffix script rewrites the last ones, and whatever lies between
is copied. Scripts are found around the longest common substring of token
and word ("common root") and are the shortest ones in serialized length.

Serialized forms (these strings are the classifier classes)::

    A<value>                       absolute rule
    R<part>;<part>...              relative rule, one part per value word
    <selector><casing><prefix>|<suffix>
                                   casing: ↓ lower, ↑ upper-first, • as-is
    =n keep  -n delete  +s insert  ~s substitute (len(s) characters)

Inside ``+``/``~`` strings the characters ``=-+~|;\\`` are backslash-escaped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

KEEP, DELETE, INSERT, SUBSTITUTE = "=", "-", "+", "~"
LOWER, UPPER_FIRST, AS_IS = "↓", "↑", "•"
NONE = "NONE"

_SPECIAL = frozenset("=-+~|;\\")
_CASINGS = (LOWER, UPPER_FIRST, AS_IS)

Op = tuple[str, Union[int, str]]


class EncodingError(ValueError):
    pass


class SelectorOutOfRange(EncodingError):
    pass


class RuleNotApplicable(EncodingError):
    pass


def _escape(text: str) -> str:
    return "".join("\\" + c if c in _SPECIAL else c for c in text)


def _escaped_len(text: str) -> int:
    return len(text) + sum(c in _SPECIAL for c in text)


def serialize_ops(ops: Iterable[Op]) -> str:
    out = []
    for kind, arg in ops:
        out.append(kind + (str(arg) if kind in (KEEP, DELETE) else _escape(arg)))
    return "".join(out)


@dataclass(frozen=True)
class EditScript:
    prefix_ops: tuple[Op, ...] = ()
    suffix_ops: tuple[Op, ...] = ()
    casing: str = LOWER

    def serialize(self) -> str:
        return f"{self.casing}{serialize_ops(self.prefix_ops)}|{serialize_ops(self.suffix_ops)}"

    def apply(self, token: str) -> str:
        source = token if self.casing == AS_IS else token.lower()
        head, tail = _consumed(self.prefix_ops), _consumed(self.suffix_ops)
        if head + tail > len(source):
            raise RuleNotApplicable(f"script {self.serialize()!r} needs {head + tail} characters, token {token!r} has {len(source)}")
        middle = source[head:len(source) - tail]
        result = _run(self.prefix_ops, source[:head]) + middle + _run(self.suffix_ops, source[len(source) - tail:])
        if self.casing == UPPER_FIRST:
            result = result[:1].upper() + result[1:]
        return result


@dataclass(frozen=True)
class Absolute:
    value: str

    def serialize(self) -> str:
        return "A" + self.value


@dataclass(frozen=True)
class Relative:
    parts: tuple[tuple[int, EditScript], ...]

    def serialize(self) -> str:
        return "R" + ";".join(f"{sel}{script.serialize()}" for sel, script in self.parts)


EncodingRule = Union[Absolute, Relative]


def _consumed(ops: Iterable[Op]) -> int:
    total = 0
    for kind, arg in ops:
        if kind in (KEEP, DELETE):
            total += arg
        elif kind == SUBSTITUTE:
            total += len(arg)
    return total


def _run(ops: Iterable[Op], source: str) -> str:
    out, pos = [], 0
    for kind, arg in ops:
        if kind == KEEP:
            out.append(source[pos:pos + arg])
            pos += arg
        elif kind == DELETE:
            pos += arg
        elif kind == INSERT:
            out.append(arg)
        else:
            out.append(arg)
            pos += len(arg)
    return "".join(out)


def shortest_script(source: str, target: str) -> tuple[Op, ...]:
    """Shortest canonical op sequence rewriting ``source`` into ``target``.

    Length is measured on the serialized form; ties go to the
    lexicographically smaller serialization.
    """
    n, m = len(source), len(target)
    # best[(i, j, last_kind)] = (cost, serialized, ops)
    best: dict[tuple[int, int, str], tuple[int, str, tuple[Op, ...]]] = {(0, 0, ""): (0, "", ())}

    def relax(state, cost, text, ops):
        old = best.get(state)
        if old is None or (cost, text) < old[:2]:
            best[state] = (cost, text, ops)

    for i in range(n + 1):
        for j in range(m + 1):
            for last in ("", KEEP, DELETE, INSERT, SUBSTITUTE):
                entry = best.get((i, j, last))
                if entry is None:
                    continue
                cost, text, ops = entry
                if last != KEEP:
                    k = 0
                    while i + k < n and j + k < m and source[i + k] == target[j + k]:
                        k += 1
                        piece = f"{KEEP}{k}"
                        relax((i + k, j + k, KEEP), cost + len(piece), text + piece, ops + ((KEEP, k),))
                if last != DELETE:
                    for k in range(1, n - i + 1):
                        piece = f"{DELETE}{k}"
                        relax((i + k, j, DELETE), cost + len(piece), text + piece, ops + ((DELETE, k),))
                if last != INSERT:
                    for k in range(1, m - j + 1):
                        s = target[j:j + k]
                        piece = INSERT + _escape(s)
                        relax((i, j + k, INSERT), cost + 1 + _escaped_len(s), text + piece, ops + ((INSERT, s),))
                if last != SUBSTITUTE:
                    for k in range(1, min(n - i, m - j) + 1):
                        s = target[j:j + k]
                        piece = SUBSTITUTE + _escape(s)
                        relax((i + k, j + k, SUBSTITUTE), cost + 1 + _escaped_len(s), text + piece, ops + ((SUBSTITUTE, s),))
    finals = [best[(n, m, last)] for last in ("", KEEP, DELETE, INSERT, SUBSTITUTE) if (n, m, last) in best]
    return min(finals, key=lambda e: e[:2])[2]


def common_root(token: str, word: str) -> tuple[int, int, int]:
    """Longest common substring as (token start, word start, length).

    Ties prefer the leftmost position in the token, then in the word.
    Length 0 means the strings share no character.
    """
    n, m = len(token), len(word)
    run = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for k in range(m - 1, -1, -1):
            if token[i] == word[k]:
                run[i][k] = run[i + 1][k + 1] + 1
    best = (0, 0, 0)
    for i in range(n):
        for k in range(m):
            if run[i][k] > best[2]:
                best = (i, k, run[i][k])
    return best


def casing_of(word: str) -> str:
    lowered = word.lower()
    if word == lowered:
        return LOWER
    if word == lowered[:1].upper() + lowered[1:]:
        return UPPER_FIRST
    return AS_IS


def word_script(token: str, word: str) -> Optional[EditScript]:
    """Edit script producing ``word`` from ``token``, or None if irregular."""
    casing = casing_of(word)
    source = token if casing == AS_IS else token.lower()
    target = word if casing == AS_IS else word.lower()
    i, k, length = common_root(source, target)
    if length == 0:
        return None
    script = EditScript(
        shortest_script(source[:i], target[:k]),
        shortest_script(source[i + length:], target[k + length:]),
        casing,
    )
    try:
        if script.apply(token) == word:
            return script
    except RuleNotApplicable:
        pass
    return None


def derive_rule(tokens: Sequence[str], value: str) -> EncodingRule:
    """Rule generating ``value`` from the anchored ``tokens``."""
    words = value.split()
    if not tokens or not words or " ".join(words) != value:
        return Absolute(value)
    parts = []
    for word in words:
        options = []
        for index, token in enumerate(tokens):
            script = word_script(token, word)
            if script is not None:
                options.append((len(script.serialize()), index, script))
        if not options:
            return Absolute(value)
        _, index, script = min(options, key=lambda o: o[:2])
        parts.append((index, script))
    return Relative(tuple(parts))


def apply_rule(tokens: Sequence[str], rule: EncodingRule) -> str:
    if isinstance(rule, Absolute):
        return rule.value
    words = []
    for selector, script in rule.parts:
        if not 0 <= selector < len(tokens):
            raise SelectorOutOfRange(f"selector {selector} with {len(tokens)} anchored tokens")
        words.append(script.apply(tokens[selector]))
    return " ".join(words)


# -- parsing serialized rules --------------------------------------------

def _parse_ops(text: str, pos: int, stop: str) -> tuple[tuple[Op, ...], int]:
    ops: list[Op] = []
    while pos < len(text) and text[pos] not in stop:
        kind = text[pos]
        pos += 1
        if kind in (KEEP, DELETE):
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            if start == pos:
                raise EncodingError(f"missing count in {text!r}")
            ops.append((kind, int(text[start:pos])))
        elif kind in (INSERT, SUBSTITUTE):
            chars = []
            while pos < len(text):
                if text[pos] == "\\" and pos + 1 < len(text):
                    chars.append(text[pos + 1])
                    pos += 2
                elif text[pos] in _SPECIAL:
                    break
                else:
                    chars.append(text[pos])
                    pos += 1
            if not chars:
                raise EncodingError(f"empty {kind!r} string in {text!r}")
            ops.append((kind, "".join(chars)))
        elif kind == "\\":
            raise EncodingError(f"stray escape in {text!r}")
        else:
            raise EncodingError(f"unknown op {kind!r} in {text!r}")
    return tuple(ops), pos


def parse_rule(text: str) -> EncodingRule:
    if text.startswith("A"):
        return Absolute(text[1:])
    if not text.startswith("R"):
        raise EncodingError(f"not a serialized rule: {text!r}")
    parts = []
    pos = 1
    while pos <= len(text):
        start = pos
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if start == pos or pos >= len(text) or text[pos] not in _CASINGS:
            raise EncodingError(f"bad rule part in {text!r}")
        selector, casing = int(text[start:pos]), text[pos]
        prefix, pos = _parse_ops(text, pos + 1, "|")
        if pos >= len(text) or text[pos] != "|":
            raise EncodingError(f"missing '|' in {text!r}")
        suffix, pos = _parse_ops(text, pos + 1, ";")
        parts.append((selector, EditScript(prefix, suffix, casing)))
        pos += 1
    return Relative(tuple(parts))


# -- inventories ----------------------------------------------------------

def choose_mode(absolute_count: int, relative_count: int) -> str:
    return "absolute" if absolute_count <= relative_count else "relative"


@dataclass(frozen=True)
class RuleInventory:
    property: str
    mode: str
    classes: tuple[str, ...]
    absolute_count: int
    relative_count: int

    def encode(self, tokens: Sequence[str], value: Optional[str]) -> str:
        """Class of ``value`` under this inventory's mode (``NONE`` for missing)."""
        if value is None:
            return NONE
        if self.mode == "absolute":
            return Absolute(value).serialize()
        return derive_rule(tokens, value).serialize()

    def decode(self, tokens: Sequence[str], cls: str) -> Optional[str]:
        if cls == NONE:
            return None
        return apply_rule(tokens, parse_rule(cls))

    def to_dict(self) -> dict:
        return {
            "property": self.property, "mode": self.mode, "classes": list(self.classes),
            "absolute_count": self.absolute_count, "relative_count": self.relative_count,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RuleInventory":
        return cls(obj["property"], obj["mode"], tuple(obj["classes"]), obj["absolute_count"], obj["relative_count"])


def build_inventory(corpus: Iterable[tuple[Sequence[str], str]], property: str = "") -> RuleInventory:
    """Count absolute and relative classes and keep the smaller encoding.

    Ties go to the absolute encoding.
    """
    values: set[str] = set()
    rules: set[str] = set()
    for tokens, value in corpus:
        values.add(value)
        rules.add(derive_rule(tokens, value).serialize())
    if not values:
        raise ValueError("cannot build an inventory from an empty corpus")
    mode = choose_mode(len(values), len(rules))
    classes = sorted(Absolute(v).serialize() for v in values) if mode == "absolute" else sorted(rules)
    return RuleInventory(property, mode, tuple(classes), len(values), len(rules))
