"""Entity-statistics features, similarity graph and fastgreedy communities.

Accounts are described by 16 statistics over the entities in their tweets,
compared by Euclidean distance after per-dimension min-max scaling, linked in
a complete weighted graph (weight ``1 / (1 + d)``) and partitioned by greedy
modularity agglomeration (Clauset-Newman-Moore).
"""

from __future__ import annotations

import logging
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .corpus import Tweet

logger = logging.getLogger(__name__)

ENTITY_CLASSES = ("urls", "hashtags", "mentions", "retweets")
ENTITY_STATS = ("total", "per_tweet", "distinct", "max_repeat")
FEATURE_NAMES = tuple(f"{e}_{s}" for e in ENTITY_CLASSES for s in ENTITY_STATS)
N_FEATURES = len(FEATURE_NAMES)

# retweets without a mentioned source still count, under this placeholder
UNKNOWN_SOURCE = "<unknown>"


class DegeneratePartitionWarning(UserWarning):
    """All accounts ended up in a single community."""


@dataclass(frozen=True)
class FeatureVector:
    account_id: str
    values: np.ndarray


@dataclass(frozen=True)
class SimilarityGraph:
    """Dense symmetric weight matrix over ``nodes``; zero diagonal."""

    nodes: tuple[str, ...]
    weights: np.ndarray

    def edges(self):
        n = len(self.nodes)
        for i in range(n):
            for j in range(i + 1, n):
                if self.weights[i, j] > 0:
                    yield self.nodes[i], self.nodes[j], float(self.weights[i, j])

    def to_text(self) -> str:
        rows = ["id_a\tid_b\tweight"] + [f"{a}\t{b}\t{w:.6f}" for a, b, w in self.edges()]
        return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class Partition:
    communities: tuple[tuple[str, ...], ...]
    modularity: float

    def membership(self) -> dict[str, int]:
        return {node: ci for ci, members in enumerate(self.communities) for node in members}


def _entity_values(tweets: Sequence[Tweet], entity: str) -> list[str]:
    if entity == "retweets":
        return [t.mentions[0] if t.mentions else UNKNOWN_SOURCE for t in tweets if t.kind == "retweet"]
    return [v for t in tweets for v in getattr(t, entity)]


def extract_features(account, tweets: Sequence[Tweet]) -> FeatureVector:
    """16-dimensional entity statistics of one timeline (zero vector if empty)."""
    account_id = account if isinstance(account, str) else account.id
    foreign = [t.id for t in tweets if t.account_id != account_id]
    if foreign:
        raise ValueError(f"tweets {foreign[:5]} do not belong to account {account_id}")
    values = np.zeros(N_FEATURES)
    n = len(tweets)
    if n:
        for ei, entity in enumerate(ENTITY_CLASSES):
            items = _entity_values(tweets, entity)
            if not items:
                continue
            counts = Counter(items)
            values[4 * ei: 4 * ei + 4] = (
                len(items),
                len(items) / n,
                len(counts),
                max(counts.values()),
            )
    return FeatureVector(account_id, values)


def minmax_normalize(X: np.ndarray) -> np.ndarray:
    """Scale each column to [0, 1]; constant columns map to 0."""
    X = np.asarray(X, dtype=float)
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = hi - lo
    out = np.zeros_like(X)
    ok = span > 0
    out[:, ok] = (X[:, ok] - lo[ok]) / span[ok]
    return out


def distance_weights(X: np.ndarray) -> np.ndarray:
    """Pairwise ``1 / (1 + euclidean)`` weights with a zero diagonal."""
    sq = np.sum(X * X, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * X @ X.T, 0.0)
    W = 1.0 / (1.0 + np.sqrt(d2))
    np.fill_diagonal(W, 0.0)
    return (W + W.T) / 2.0


def build_graph(vectors: Sequence[FeatureVector], normalize: bool = True) -> SimilarityGraph:
    if len(vectors) < 2:
        raise ValueError("build_graph needs at least 2 feature vectors")
    dims = {len(v.values) for v in vectors}
    if len(dims) != 1:
        raise ValueError(f"feature dimension mismatch: {sorted(dims)}")
    X = np.vstack([v.values for v in vectors]).astype(float)
    if not np.all(np.isfinite(X)):
        raise ValueError("feature vectors contain non-finite values")
    if normalize:
        X = minmax_normalize(X)
    return SimilarityGraph(tuple(v.account_id for v in vectors), distance_weights(X))


def modularity(weights: np.ndarray, labels: Sequence[int]) -> float:
    """Weighted Newman modularity of the partition given by ``labels``."""
    W = np.asarray(weights, dtype=float)
    two_m = W.sum()
    if two_m == 0:
        return 0.0
    labels = np.asarray(labels)
    k = W.sum(axis=1)
    q = 0.0
    for c in np.unique(labels):
        idx = labels == c
        q += W[np.ix_(idx, idx)].sum() / two_m - (k[idx].sum() / two_m) ** 2
    return float(q)


def fastgreedy_labels(weights: np.ndarray) -> tuple[np.ndarray, float]:
    """Greedy modularity agglomeration on a dense weight matrix.

    Starts from singletons and merges the pair of communities with the largest
    modularity gain while that gain is positive. Equal gains go to the
    lexicographically smallest pair of community ids, where a community's id
    is its smallest node index. Returns ``(labels, modularity)`` with labels
    renumbered 0..c-1 in order of first appearance.
    """
    W = np.array(weights, dtype=float)
    n = W.shape[0]
    if n == 0:
        raise ValueError("empty graph")
    two_m = W.sum()
    owner = np.arange(n)
    if n == 1 or two_m == 0:
        return owner.copy() if n > 1 else np.zeros(1, dtype=int), 0.0

    E = W / two_m  # E[i, j]: fraction of edge ends between communities i and j
    a = E.sum(axis=1)
    q = float(np.trace(E) - np.sum(a * a))
    alive = np.ones(n, dtype=bool)

    dQ = 2.0 * (E - np.outer(a, a))
    np.fill_diagonal(dQ, -np.inf)
    row_best = dQ.max(axis=1)
    row_arg = dQ.argmax(axis=1)

    while True:
        i = int(np.argmax(row_best))
        gain = row_best[i]
        if not gain > 0:
            break
        j = int(row_arg[i])
        i, j = min(i, j), max(i, j)

        # merge j into i
        E[i, :] += E[j, :]
        E[:, i] += E[:, j]
        a[i] += a[j]
        alive[j] = False
        owner[owner == j] = i
        q += gain

        E[j, :] = 0.0
        E[:, j] = 0.0
        new = 2.0 * (E[i, :] - a[i] * a)
        new[~alive] = -np.inf
        new[i] = -np.inf
        dQ[i, :] = new
        dQ[:, i] = new
        dQ[j, :] = -np.inf
        dQ[:, j] = -np.inf
        row_best[j] = -np.inf

        stale = alive & ((row_arg == i) | (row_arg == j))
        stale[i] = True
        rows = np.flatnonzero(stale)
        row_arg[rows] = dQ[rows].argmax(axis=1)
        row_best[rows] = dQ[rows, row_arg[rows]]
        fresh = alive & ~stale
        col = dQ[:, i]
        better = fresh & ((col > row_best) | ((col == row_best) & (i < row_arg)))
        row_best[better] = col[better]
        row_arg[better] = i

    _, labels = np.unique(owner, return_inverse=True)
    return labels, q


def fastgreedy(graph: SimilarityGraph) -> Partition:
    if not graph.nodes:
        raise ValueError("empty graph")
    labels, _ = fastgreedy_labels(graph.weights)
    groups: dict[int, list[str]] = {}
    for node, lab in zip(graph.nodes, labels):
        groups.setdefault(int(lab), []).append(node)
    q = modularity(graph.weights, labels)
    return Partition(tuple(tuple(g) for g in groups.values()), q)


def mean_internal_weight(weights: np.ndarray, idx: np.ndarray) -> float:
    idx = np.asarray(idx)
    if len(idx) < 2:
        return 0.0
    block = weights[np.ix_(idx, idx)]
    return float(block.sum() / (len(idx) * (len(idx) - 1)))


@dataclass(frozen=True)
class ClusterLabeling:
    verdicts: dict[str, str]
    community_labels: tuple[str, ...]
    heuristic_fallback: tuple[int, ...]
    degenerate: bool


def label_clusters(partition: Partition, graph: SimilarityGraph,
                   calibration: Mapping[str, str] | None = None) -> ClusterLabeling:
    """Assign spambot/genuine to every community.

    With ``calibration`` (account id -> label) each community takes the strict
    majority label of its calibrated members. Communities without calibrated
    members, or with a tied vote, fall back to the heuristic: the community
    with the highest mean internal edge weight is the spambot one.
    """
    index = {node: i for i, node in enumerate(graph.nodes)}
    cohesion = [
        mean_internal_weight(graph.weights, np.array([index[m] for m in comm]))
        for comm in partition.communities
    ]
    densest = int(np.argmax(cohesion))
    degenerate = len(partition.communities) == 1
    if degenerate:
        warnings.warn(
            "all accounts were assigned to a single community; labels are uninformative",
            DegeneratePartitionWarning,
            stacklevel=2,
        )

    labels, fallback = [], []
    for ci, comm in enumerate(partition.communities):
        heuristic = "spambot" if ci == densest else "genuine"
        if calibration is None:
            labels.append(heuristic)
            continue
        votes = Counter(calibration[m] for m in comm if m in calibration)
        spam, genuine = votes.get("spambot", 0), votes.get("genuine", 0)
        if spam == genuine:
            fallback.append(ci)
            labels.append(heuristic)
        else:
            labels.append("spambot" if spam > genuine else "genuine")
    if fallback:
        logger.warning("communities %s had no calibration majority; heuristic used", fallback)

    verdicts = {m: labels[ci] for ci, comm in enumerate(partition.communities) for m in comm}
    verdicts = {node: verdicts[node] for node in graph.nodes}
    return ClusterLabeling(verdicts, tuple(labels), tuple(fallback), degenerate)


class EntityFeatureExtractor(TransformerMixin, BaseEstimator):
    """Map timelines (lists of tweets of one account) to the 16 entity statistics."""

    def fit(self, X, y=None):
        self.feature_names_out_ = np.array(FEATURE_NAMES, dtype=object)
        self.n_features_out_ = N_FEATURES
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        rows = []
        for timeline in X:
            timeline = list(timeline)
            owner = timeline[0].account_id if timeline else ""
            rows.append(extract_features(owner, timeline).values)
        return np.vstack(rows) if rows else np.zeros((0, N_FEATURES))

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURE_NAMES, dtype=object)


class FastGreedyDetector(ClusterMixin, BaseEstimator):
    """Community-based detector over per-account feature rows.

    ``fit(X, y=None)``: ``y`` may hold calibration labels (1 spambot, 0
    genuine, -1 unknown); without it the cohesion heuristic labels communities.
    ``labels_`` holds the 0/1 verdicts, ``communities_`` the community index of
    every row.
    """

    def __init__(self, normalize: bool = True):
        self.normalize = normalize

    def fit(self, X, y=None):
        X = check_array(X, dtype=float, ensure_min_samples=2)
        X = minmax_normalize(X) if self.normalize else X
        self.weights_ = distance_weights(X)
        ids = tuple(str(i) for i in range(len(X)))
        graph = SimilarityGraph(ids, self.weights_)
        self.partition_ = fastgreedy(graph)
        calibration = None
        if y is not None:
            y = np.asarray(y)
            calibration = {
                ids[i]: ("spambot" if v == 1 else "genuine") for i, v in enumerate(y) if v in (0, 1)
            }
        labeling = label_clusters(self.partition_, graph, calibration)
        membership = self.partition_.membership()
        self.communities_ = np.array([membership[i] for i in ids], dtype=int)
        self.labels_ = np.array([1 if labeling.verdicts[i] == "spambot" else 0 for i in ids])
        self.degenerate_ = labeling.degenerate
        self.modularity_ = self.partition_.modularity
        return self
