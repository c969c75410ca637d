"""Reputation-score distribution tamper test.

A suspect group is compared with a reference group by the Kullback-Leibler
divergence between Laplace-smoothed histograms of one reputation score
(account join date or follower count). The verdict is group level only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import Account

SCORE_KINDS = ("join_date", "followers_count")


def quarter_index(dt: datetime) -> int:
    """Calendar quarters since year 0: 2012-Q1 -> 8048."""
    return dt.year * 4 + (dt.month - 1) // 3


def quarter_label(index: float) -> str:
    index = int(math.floor(index))
    return f"{index // 4}-Q{index % 4 + 1}"


def score_values(accounts: Sequence[Account], score_kind: str) -> np.ndarray:
    """Raw values that get binned: quarter index for join dates, log10(1+x) for followers."""
    if score_kind == "join_date":
        return np.array([quarter_index(a.created_at) for a in accounts], dtype=float)
    if score_kind == "followers_count":
        return np.log10(1.0 + np.array([a.followers_count for a in accounts], dtype=float))
    raise ValueError(f"unknown score kind {score_kind!r}; expected one of {SCORE_KINDS}")


def bin_edges(values: np.ndarray, score_kind: str, bin_count: int) -> np.ndarray:
    """Equal-width edges over the range of ``values``.

    Join-date edges fall on quarter boundaries: each bin spans a whole number
    of quarters, so the last edge may extend past the latest quarter.
    """
    if bin_count < 2:
        raise ValueError("bin_count must be >= 2")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot bin an empty group")
    lo, hi = float(values.min()), float(values.max())
    if score_kind == "join_date":
        span = int(hi - lo) + 1
        width = max(1, math.ceil(span / bin_count))
        return lo + width * np.arange(bin_count + 1, dtype=float)
    if hi == lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, bin_count + 1)


def bin_counts(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Counts per bin; values outside the edges land in the end bins."""
    idx = np.searchsorted(edges, values, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 2)
    return np.bincount(idx, minlength=len(edges) - 1)


@dataclass(frozen=True)
class ScoreDistribution:
    score_kind: str
    edges: np.ndarray
    probabilities: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if len(self.edges) != len(self.probabilities) + 1:
            raise ValueError("edges must have one more entry than probabilities")
        if abs(float(self.probabilities.sum()) - 1.0) > 1e-9:
            raise ValueError("probabilities do not sum to 1")
        if np.any(self.probabilities <= 0):
            raise ValueError("smoothed probabilities must be positive")

    @property
    def floor(self) -> float:
        return 1.0 / (self.counts.sum() + len(self.counts))

    def to_text(self) -> str:
        rows = ["bin_lo\tbin_hi\tmass"]
        for lo, hi, p in zip(self.edges[:-1], self.edges[1:], self.probabilities):
            if self.score_kind == "join_date":
                rows.append(f"{quarter_label(lo)}\t{quarter_label(hi)}\t{p:.6f}")
            else:
                rows.append(f"{lo:.6f}\t{hi:.6f}\t{p:.6f}")
        return "\n".join(rows) + "\n"


def distribution(values: np.ndarray, score_kind: str, edges: np.ndarray,
                 pseudo_count: float = 1.0) -> ScoreDistribution:
    counts = bin_counts(np.asarray(values, dtype=float), edges)
    smoothed = counts + pseudo_count
    return ScoreDistribution(score_kind, np.asarray(edges, dtype=float),
                             smoothed / smoothed.sum(), counts)


def histogram(accounts: Sequence[Account], score_kind: str, bin_count: int,
              edges: np.ndarray | None = None) -> ScoreDistribution:
    """Laplace-smoothed histogram of a reputation score.

    Without ``edges`` the bins span the range of ``accounts`` themselves.
    """
    if len(accounts) == 0:
        raise ValueError("histogram needs at least one account")
    values = score_values(accounts, score_kind)
    if edges is None:
        edges = bin_edges(values, score_kind, bin_count)
    return distribution(values, score_kind, edges)


def kl_divergence(p: ScoreDistribution | np.ndarray, q: ScoreDistribution | np.ndarray) -> float:
    """KL(p || q) in nats."""
    if isinstance(p, ScoreDistribution) and isinstance(q, ScoreDistribution):
        if p.score_kind != q.score_kind or not np.array_equal(p.edges, q.edges):
            raise ValueError("distributions have different score kinds or bins")
        p, q = p.probabilities, q.probabilities
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"bin mismatch: {p.shape} vs {q.shape}")
    nz = p > 0
    if np.any(q[nz] <= 0):
        return math.inf
    return max(0.0, float(np.sum(p[nz] * np.log(p[nz] / q[nz]))))


@dataclass(frozen=True)
class TamperVerdict:
    kl_value: float
    threshold: float
    tampered: bool

    def to_text(self) -> str:
        return f"kl_value={self.kl_value:.6f}\tthreshold={self.threshold:.6f}\ttampered={str(self.tampered).lower()}\n"


def tamper_test(suspect: Sequence[Account], reference: Sequence[Account], score_kind: str,
                threshold: float, bin_count: int = 20) -> TamperVerdict:
    """Flag ``suspect`` when KL(suspect || reference) exceeds ``threshold``."""
    if not suspect or not reference:
        raise ValueError("tamper_test needs non-empty suspect and reference groups")
    ref_values = score_values(reference, score_kind)
    edges = bin_edges(ref_values, score_kind, bin_count)
    p = distribution(score_values(suspect, score_kind), score_kind, edges)
    q = distribution(ref_values, score_kind, edges)
    kl = kl_divergence(p, q)
    return TamperVerdict(kl, float(threshold), kl > threshold)


def bootstrap_kl(reference_values: np.ndarray, score_kind: str, bin_count: int,
                 sample_size: int, n_boot: int = 200, seed: int = 0) -> np.ndarray:
    """KL of random reference subsets (size ``sample_size``) against the remainder."""
    values = np.asarray(reference_values, dtype=float)
    n = len(values)
    if n < 2:
        raise ValueError("need at least 2 reference accounts to calibrate")
    size = int(min(max(sample_size, 1), n // 2 if n >= 2 else 1))
    edges = bin_edges(values, score_kind, bin_count)
    rng = np.random.default_rng(seed)
    out = np.empty(n_boot)
    for b in range(n_boot):
        perm = rng.permutation(n)
        inside, rest = values[perm[:size]], values[perm[size:]]
        out[b] = kl_divergence(distribution(inside, score_kind, edges),
                               distribution(rest, score_kind, edges))
    return out


def calibrate_threshold(reference: Sequence[Account], score_kind: str, bin_count: int = 20,
                        sample_size: int | None = None, n_boot: int = 200,
                        quantile: float = 0.99, seed: int = 0) -> float:
    """``quantile`` of bootstrap KL values between reference splits."""
    values = score_values(reference, score_kind)
    size = sample_size if sample_size is not None else len(values) // 2
    kls = bootstrap_kl(values, score_kind, bin_count, size, n_boot, seed)
    return float(np.quantile(kls, quantile))


class DistributionTamperDetector(BaseEstimator):
    """Fit on a reference group, then judge suspect groups.

    ``threshold=None`` calibrates it at ``fit`` time from bootstrap splits of
    the reference group (``quantile`` of the KL values, subsets the size of
    ``sample_size`` or half the reference).
    """

    def __init__(self, score_kind: str = "join_date", bin_count: int = 20,
                 threshold: float | None = None, quantile: float = 0.99,
                 n_boot: int = 200, sample_size: int | None = None, random_state: int = 0):
        self.score_kind = score_kind
        self.bin_count = bin_count
        self.threshold = threshold
        self.quantile = quantile
        self.n_boot = n_boot
        self.sample_size = sample_size
        self.random_state = random_state

    def fit(self, reference: Sequence[Account], y=None):
        if self.score_kind not in SCORE_KINDS:
            raise ValueError(f"score_kind must be one of {SCORE_KINDS}")
        if len(reference) == 0:
            raise ValueError("empty reference group")
        self.reference_values_ = score_values(reference, self.score_kind)
        self.edges_ = bin_edges(self.reference_values_, self.score_kind, self.bin_count)
        self.reference_distribution_ = distribution(self.reference_values_, self.score_kind, self.edges_)
        if self.threshold is None:
            size = self.sample_size if self.sample_size is not None else len(reference) // 2
            kls = bootstrap_kl(self.reference_values_, self.score_kind, self.bin_count,
                               size, self.n_boot, self.random_state)
            self.threshold_ = float(np.quantile(kls, self.quantile))
        else:
            self.threshold_ = float(self.threshold)
        return self

    def score(self, suspect: Sequence[Account], y=None) -> float:
        """KL(suspect || reference) in nats."""
        check_is_fitted(self, "edges_")
        p = distribution(score_values(suspect, self.score_kind), self.score_kind, self.edges_)
        return kl_divergence(p, self.reference_distribution_)

    def predict(self, suspect: Sequence[Account]) -> TamperVerdict:
        if len(suspect) == 0:
            raise ValueError("empty suspect group")
        kl = self.score(suspect)
        return TamperVerdict(kl, self.threshold_, kl > self.threshold_)
