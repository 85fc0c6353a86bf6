"""Decoding state and the features the baseline classifiers condition on.

Features only look at the frozen state of the graph being built, never at
gold structure that has not been created yet.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

from ..graph import ANCHOR_LABEL
from ..tokenizer import Token
from ..uniform import SEMANTIC, TOKEN

TOKEN_CLASS = "<token>"
BLANK = "_"


@dataclass(frozen=True)
class Analysis:
    form: str
    lemma: str = BLANK
    upos: str = BLANK


def read_companion(stream: TextIO | Iterable[str]) -> dict[str, list[Analysis]]:
    """Read a CoNLL-U-like file keyed by ``# sent_id = ...`` comments.

    Ten-column CoNLL-U rows use FORM, LEMMA and UPOS; three-column rows are
    read as form, lemma, upos. Multiword ranges and empty nodes are skipped.
    """
    result: dict[str, list[Analysis]] = {}
    current: Optional[str] = None
    rows: list[Analysis] = []

    def flush():
        if current is not None:
            result[current] = rows

    for line in stream:
        line = line.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            text = line[1:].strip()
            if text.startswith("sent_id") and "=" in text:
                flush()
                current = text.split("=", 1)[1].strip()
                rows = []
            continue
        cols = line.split("\t")
        if len(cols) >= 10:
            if "-" in cols[0] or "." in cols[0]:
                continue
            rows.append(Analysis(cols[1], cols[2], cols[3]))
        elif len(cols) >= 3:
            rows.append(Analysis(cols[0], cols[1], cols[2]))
        else:
            rows.append(Analysis(cols[0]))
    flush()
    return result


def align_companion(tokens: Sequence[Token], rows: Optional[Sequence[Analysis]]) -> list[Analysis]:
    """Attach analyses to tokens by matching forms left to right."""
    out = [Analysis(t.form) for t in tokens]
    if not rows:
        return out
    pos = 0
    for i, token in enumerate(tokens):
        for j in range(pos, min(pos + 4, len(rows))):
            if rows[j].form == token.form:
                out[i] = rows[j]
                pos = j + 1
                break
    return out


@dataclass
class State:
    """The partially built uniform graph during decoding."""

    tokens: tuple[Token, ...]
    analyses: list[Analysis]
    kinds: list[str] = field(default_factory=list)
    gen_token: list[int] = field(default_factory=list)
    created_at: list[int] = field(default_factory=list)
    label_class: list[str] = field(default_factory=list)
    property_classes: list[dict[str, str]] = field(default_factory=list)
    # (source, target) -> list of (label, attributes)
    edges: dict[tuple[int, int], list[tuple[Optional[str], tuple]]] = field(default_factory=dict)
    virtual_root: bool = False

    @classmethod
    def initial(cls, tokens: Sequence[Token], analyses: Optional[Sequence[Analysis]] = None,
                virtual_root: bool = False) -> "State":
        tokens = tuple(tokens)
        state = cls(tokens, list(analyses) if analyses is not None else [Analysis(t.form) for t in tokens],
                    virtual_root=virtual_root)
        for t in tokens:
            state.kinds.append(TOKEN)
            state.gen_token.append(t.index)
            state.created_at.append(0)
            state.label_class.append(TOKEN_CLASS)
            state.property_classes.append({})
        return state

    def __len__(self) -> int:
        return len(self.kinds)

    def add_node(self, origin: int, iteration: int, label_class: str, properties: dict[str, str]) -> int:
        self.kinds.append(SEMANTIC)
        self.gen_token.append(self.gen_token[origin])
        self.created_at.append(iteration)
        self.label_class.append(label_class)
        self.property_classes.append(properties)
        return len(self.kinds) - 1

    def add_edge(self, source: int, target: int, label: Optional[str], attributes: tuple = ()) -> None:
        labels = self.edges.setdefault((source, target), [])
        if all(existing != label for existing, _ in labels):
            labels.append((label, attributes))

    def has_pair(self, source: int, target: int) -> bool:
        return (source, target) in self.edges

    def anchored_tokens(self, node: int) -> list[int]:
        """Token indices anchored by ``node`` (the virtual root excluded)."""
        first = 1 if self.virtual_root else 0
        out = []
        for (s, t), labels in self.edges.items():
            if s == node and self.kinds[t] == TOKEN and any(l == ANCHOR_LABEL for l, _ in labels):
                if t >= first:
                    out.append(t)
        return sorted(out)

    def node_tokens(self, node: int) -> list[str]:
        """Token forms that labels and properties of ``node`` are generated from."""
        anchored = self.anchored_tokens(node)
        if not anchored:
            anchored = [self.gen_token[node]]
        return [self.tokens[i].form for i in anchored]

    # -- features ---------------------------------------------------------

    def _form(self, index: int) -> str:
        return self.tokens[index].form if 0 <= index < len(self.tokens) else "<s>"

    def incident(self, node: int) -> tuple[list[str], list[str]]:
        edge_labels, neighbour_labels = [], []
        for (s, t), labels in self.edges.items():
            if s == node or t == node:
                other = t if s == node else s
                arrow = ">" if s == node else "<"
                edge_labels.extend(f"{arrow}{label}" for label, _ in labels)
                neighbour_labels.append(self.label_class[other])
        return sorted(edge_labels), sorted(neighbour_labels)

    def node_chain(self, node: int, iteration: int) -> list[str]:
        """Backoff keys: full node view, token form, POS."""
        gen = self.gen_token[node]
        analysis = self.analyses[gen] if gen < len(self.analyses) else Analysis(self._form(gen))
        edge_labels, neighbour_labels = self.incident(node)
        full = [
            self.kinds[node], self._form(gen), analysis.lemma, analysis.upos,
            self._form(gen - 1), self._form(gen + 1), iteration, self.created_at[node],
            self.label_class[node], edge_labels, neighbour_labels,
        ]
        return [_key(full), _key(["form", self._form(gen)]), _key(["pos", analysis.upos])]

    def _signature(self, node: int) -> list:
        gen = self.gen_token[node]
        return [self.kinds[node], self._form(gen), self._form(gen - 1), self._form(gen + 1),
                self.label_class[node], self.created_at[node]]

    def pair_chain(self, source: int, target: int, iteration: int) -> list[str]:
        """Backoff keys for a candidate edge: full pair view, forms, POS."""
        gs, gt = self.gen_token[source], self.gen_token[target]
        distance = gt - gs
        full = [self._signature(source), self._signature(target), distance, iteration]
        forms = ["form", self.kinds[source], self._form(gs), self.label_class[source],
                 self.kinds[target], self._form(gt), self.label_class[target]]
        pos = ["pos", self.kinds[source], self._upos(gs), self.kinds[target], self._upos(gt)]
        return [_key(full), _key(forms), _key(pos)]

    def _upos(self, index: int) -> str:
        return self.analyses[index].upos if 0 <= index < len(self.analyses) else BLANK


def _key(parts: list) -> str:
    return json.dumps(parts, ensure_ascii=False, separators=(",", ":"))
