"""Count-based classifier with a feature backoff chain.

Each example carries a chain of keys ordered from most to least specific.
Prediction uses the class distribution of the first key in the chain that
was seen during training and falls back to the global distribution.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Optional, Sequence

Chain = Sequence[str]


class BackoffClassifier:
    def __init__(self, levels: int):
        self.levels = levels
        self.tables: list[dict[str, Counter]] = [{} for _ in range(levels)]
        self.prior: Counter = Counter()

    def train(self, examples: Iterable[tuple[Chain, str]]) -> "BackoffClassifier":
        for chain, cls in examples:
            if len(chain) != self.levels:
                raise ValueError(f"expected {self.levels} backoff keys, got {len(chain)}")
            for table, key in zip(self.tables, chain):
                table.setdefault(key, Counter())[cls] += 1
            self.prior[cls] += 1
        return self

    def distribution(self, chain: Chain) -> Counter:
        for table, key in zip(self.tables, chain):
            counts = table.get(key)
            if counts:
                return counts
        return self.prior

    def scores(self, chain: Chain) -> dict[str, float]:
        counts = self.distribution(chain)
        total = sum(counts.values())
        return {cls: n / total for cls, n in counts.items()} if total else {}

    def ranking(self, chain: Chain) -> list[str]:
        """Seen classes, best first; ties by class name."""
        counts = self.distribution(chain)
        return [cls for cls, _ in sorted(counts.items(), key=lambda item: (-item[1], item[0]))]

    def predict(self, chain: Chain, default: Optional[str] = None) -> Optional[str]:
        ranked = self.ranking(chain)
        return ranked[0] if ranked else default

    @property
    def classes(self) -> list[str]:
        return sorted(self.prior)

    def to_dict(self) -> dict:
        return {
            "levels": self.levels,
            "tables": [{key: dict(sorted(counts.items())) for key, counts in sorted(t.items())} for t in self.tables],
            "prior": dict(sorted(self.prior.items())),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "BackoffClassifier":
        clf = cls(obj["levels"])
        clf.tables = [{key: Counter(counts) for key, counts in t.items()} for t in obj["tables"]]
        clf.prior = Counter(obj["prior"])
        if len(clf.tables) != clf.levels:
            raise ValueError("table count does not match levels")
        return clf

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BackoffClassifier) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f"BackoffClassifier(levels={self.levels}, classes={len(self.prior)}, examples={sum(self.prior.values())})"
