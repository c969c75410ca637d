"""Generalized suffix array over a set of strings.

All strings are concatenated with a distinct separator after each one, so no
common prefix can run across a string boundary. The LCP intervals of the
concatenation are enumerated bottom-up; each interval records its depth and
the number of distinct source strings among its suffixes. That single pass
answers "longest substring shared by at least k strings" for every k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def suffix_array(text: np.ndarray) -> np.ndarray:
    """Suffix array of an integer array by prefix doubling, O(n log^2 n)."""
    n = len(text)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rank = np.unique(text, return_inverse=True)[1].astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        order = np.lexsort((second, rank))
        r, s = rank[order], second[order]
        changed = np.empty(n, dtype=np.int64)
        changed[0] = 0
        changed[1:] = (r[1:] != r[:-1]) | (s[1:] != s[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[order] = np.cumsum(changed)
        rank = new_rank
        if rank.max() == n - 1 or k >= n:
            return order
        k *= 2


def lcp_array(text: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai's algorithm. ``lcp[i]`` is the LCP of suffixes ``sa[i-1]`` and ``sa[i]``; ``lcp[0] = 0``."""
    n = len(sa)
    t = text.tolist()
    sa_l = sa.tolist()
    rank = [0] * n
    for i, p in enumerate(sa_l):
        rank[p] = i
    lcp = [0] * n
    h = 0
    for p in range(n):
        r = rank[p]
        if r == 0:
            h = 0
            continue
        q = sa_l[r - 1]
        while p + h < n and q + h < n and t[p + h] == t[q + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return np.asarray(lcp, dtype=np.int64)


@dataclass
class _Interval:
    depth: int
    lb: int
    colors: set


class GeneralizedSuffixArray:
    """Suffix array + LCP over ``strings`` with per-interval string counts.

    Parameters
    ----------
    strings : sequence of str
        Non-empty strings. Characters are ordered by code point, so suffix
        order agrees with ordinary string order.
    """

    def __init__(self, strings):
        strings = list(strings)
        if any(len(s) == 0 for s in strings):
            raise ValueError("empty strings are not allowed")
        self.strings = strings
        alphabet = sorted(set("".join(strings)))
        code = {c: i + 1 for i, c in enumerate(alphabet)}
        sigma = len(alphabet)

        parts, owner = [], []
        for idx, s in enumerate(strings):
            parts.append([code[c] for c in s] + [sigma + 1 + idx])
            owner.append(np.full(len(s) + 1, idx, dtype=np.int64))
        self.text = np.fromiter((x for p in parts for x in p), dtype=np.int64)
        self.owner = np.concatenate(owner) if owner else np.zeros(0, dtype=np.int64)
        self.sa = suffix_array(self.text)
        self.lcp = lcp_array(self.text, self.sa)
        self._offsets = np.cumsum([0] + [len(s) + 1 for s in strings])
        self._enumerate_intervals()

    def _enumerate_intervals(self) -> None:
        n = len(self.sa)
        color = self.owner[self.sa].tolist()
        lcp = self.lcp.tolist()
        depths, counts, lbs = [], [], []

        def absorb(target: _Interval, colors: set) -> None:
            if len(target.colors) < len(colors):
                colors |= target.colors
                target.colors = colors
            else:
                target.colors |= colors

        stack = [_Interval(0, 0, set())]
        for i in range(1, n + 1):
            h = lcp[i] if i < n else -1
            if h > stack[-1].depth:
                # suffix i-1 opens a deeper interval
                stack.append(_Interval(h, i - 1, {color[i - 1]}))
                continue
            stack[-1].colors.add(color[i - 1])
            lb = i - 1
            carry = None
            while stack and h < stack[-1].depth:
                top = stack.pop()
                if top.depth > 0:
                    depths.append(top.depth)
                    counts.append(len(top.colors))
                    lbs.append(top.lb)
                lb = top.lb
                carry = top.colors
                if stack and h <= stack[-1].depth:
                    absorb(stack[-1], carry)
                    carry = None
            if not stack:
                break
            if h > stack[-1].depth:
                stack.append(_Interval(h, lb, carry if carry is not None else set()))

        self.interval_depth = np.asarray(depths, dtype=np.int64)
        self.interval_count = np.asarray(counts, dtype=np.int64)
        self.interval_lb = np.asarray(lbs, dtype=np.int64)

    def lcs_by_k(self) -> np.ndarray:
        """Array ``out`` with ``out[k]`` = longest substring length shared by >= k strings."""
        n_str = len(self.strings)
        best = np.zeros(n_str + 2, dtype=np.int64)
        if len(self.interval_depth):
            np.maximum.at(best, self.interval_count, self.interval_depth)
        # a substring in >= k strings is also in >= k-1 strings
        return np.maximum.accumulate(best[::-1])[::-1]

    def witness(self, k: int, length: int) -> str:
        """Lexicographically smallest substring of ``length`` found in >= ``k`` strings."""
        if length <= 0:
            return ""
        mask = (self.interval_count >= k) & (self.interval_depth >= length)
        if not mask.any():
            raise ValueError(f"no substring of length {length} shared by {k} strings")
        lb = int(self.interval_lb[mask].min())
        pos = int(self.sa[lb])
        src = int(self.owner[pos])
        start = pos - int(self._offsets[src])
        return self.strings[src][start:start + length]
