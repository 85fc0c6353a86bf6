"""Independent reference computations used to check the implementation."""

from __future__ import annotations

import heapq
from functools import lru_cache

SPECIAL = set("=-+~|;\\")


def _text_cost(s: str) -> int:
    return 1 + len(s) + sum(c in SPECIAL for c in s)


@lru_cache(maxsize=None)
def min_script_cost(source: str, target: str) -> int:
    """Shortest serialized length of any op sequence turning source into target.

    Dijkstra over (i, j) positions with one edge per single op. Unlike the
    implementation it allows adjacent ops of the same kind; merging them
    never makes a script longer, so the optimum is the same.
    """
    n, m = len(source), len(target)
    dist = {(0, 0): 0}
    heap = [(0, 0, 0)]
    while heap:
        d, i, j = heapq.heappop(heap)
        if (i, j) == (n, m):
            return d
        if d > dist[(i, j)]:
            continue
        steps = []
        k = 0
        while i + k < n and j + k < m and source[i + k] == target[j + k]:
            k += 1
            steps.append((i + k, j + k, 1 + len(str(k))))
        for k in range(1, n - i + 1):
            steps.append((i + k, j, 1 + len(str(k))))
        for k in range(1, m - j + 1):
            steps.append((i, j + k, _text_cost(target[j:j + k])))
        for k in range(1, min(n - i, m - j) + 1):
            steps.append((i + k, j + k, _text_cost(target[j:j + k])))
        for a, b, c in steps:
            if d + c < dist.get((a, b), 1 << 30):
                dist[(a, b)] = d + c
                heapq.heappush(heap, (d + c, a, b))
    raise AssertionError("unreachable")


def longest_common_substring(a: str, b: str) -> tuple[int, int, int]:
    """Brute force: (start in a, start in b, length), leftmost in a then in b."""
    best = (0, 0, 0)
    for length in range(min(len(a), len(b)), 0, -1):
        for i in range(len(a) - length + 1):
            j = b.find(a[i:i + length])
            if j >= 0:
                return (i, j, length)
    return best
