"""Digital-DNA encoding and LCS-based group detection."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus import TWEET_KINDS, Account, Tweet
from .suffix import GeneralizedSuffixArray

# Characters that may never be used as DNA symbols.
RESERVED = frozenset("\x00$;,\n\r\t ")


@dataclass(frozen=True)
class DnaAlphabet:
    mapping: Mapping[str, str] = field(
        default_factory=lambda: {"plain": "A", "reply": "C", "retweet": "T"}
    )

    def __post_init__(self):
        symbols = list(self.mapping.values())
        if set(self.mapping) != set(TWEET_KINDS):
            raise ValueError(f"alphabet must map exactly {TWEET_KINDS}")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet mapping is not injective")
        for s in symbols:
            if len(s) != 1 or s in RESERVED:
                raise ValueError(f"invalid DNA symbol {s!r}")

    def __getitem__(self, kind: str) -> str:
        try:
            return self.mapping[kind]
        except KeyError:
            raise ValueError(f"tweet kind {kind!r} not in alphabet") from None

    @property
    def symbols(self) -> str:
        return "".join(self.mapping[k] for k in TWEET_KINDS)


DEFAULT_ALPHABET = DnaAlphabet()


@dataclass(frozen=True)
class DnaSequence:
    account_id: str
    symbols: str

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class SimilarityCurve:
    """``lcs[i]`` is the LCS length shared by at least ``ks[i]`` sequences."""

    ks: np.ndarray
    lcs: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.lcs) > 0):
            raise AssertionError("similarity curve is not monotonically non-increasing")

    def __getitem__(self, k: int) -> int:
        i = int(k) - int(self.ks[0])
        if i < 0 or i >= len(self.ks):
            raise KeyError(k)
        return int(self.lcs[i])

    def as_dict(self) -> dict[int, int]:
        return {int(k): int(v) for k, v in zip(self.ks, self.lcs)}

    def to_text(self) -> str:
        lines = ["k\tlcs"] + [f"{k}\t{v}" for k, v in zip(self.ks, self.lcs)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GroupSplit:
    k_star: int | None
    witness: str
    members_high_similarity: tuple[str, ...]
    verdicts: dict[str, str]

    def to_text(self) -> str:
        lines = ["account_id\tverdict"] + [f"{a}\t{v}" for a, v in self.verdicts.items()]
        return "\n".join(lines) + "\n"


def encode_account(account: Account | str, tweets: Sequence[Tweet],
                   alphabet: DnaAlphabet = DEFAULT_ALPHABET) -> DnaSequence:
    account_id = account if isinstance(account, str) else account.id
    foreign = [t.id for t in tweets if t.account_id != account_id]
    if foreign:
        raise ValueError(f"tweets {foreign[:5]} do not belong to account {account_id}")
    ordered = sorted(tweets, key=lambda t: (t.timestamp, t.id))
    return DnaSequence(account_id, "".join(alphabet[t.kind] for t in ordered))


def _as_sequences(sequences) -> list[DnaSequence]:
    out = []
    for i, s in enumerate(sequences):
        out.append(s if isinstance(s, DnaSequence) else DnaSequence(str(i), s))
    return out


def _non_empty(sequences: list[DnaSequence]) -> list[DnaSequence]:
    seqs = [s for s in sequences if len(s)]
    if len(seqs) < 2:
        raise ValueError("lcs_curve needs at least 2 non-empty sequences")
    return seqs


def lcs_curve(sequences) -> SimilarityCurve:
    """Exact LCS length shared by at least k of the N non-empty sequences, k = 2..N."""
    return _curve_and_index(_as_sequences(sequences))[0]


def _curve_and_index(sequences: list[DnaSequence]):
    seqs = _non_empty(sequences)
    gsa = GeneralizedSuffixArray([s.symbols for s in seqs])
    by_k = gsa.lcs_by_k()
    ks = np.arange(2, len(seqs) + 1)
    return SimilarityCurve(ks, by_k[ks].copy()), gsa, seqs


def find_split(curve: SimilarityCurve) -> int | None:
    """Group size just before the largest drop of the curve; ``None`` if flat.

    Ties go to the larger k.
    """
    if len(curve.ks) < 2:
        raise ValueError("curve needs at least 2 points")
    drops = curve.lcs[:-1] - curve.lcs[1:]
    if not np.any(drops > 0):
        return None
    best = drops.max()
    i = int(np.flatnonzero(drops == best)[-1])
    return int(curve.ks[i])


def classify_group(sequences, curve: SimilarityCurve | None = None,
                   k_star: int | None = None) -> GroupSplit:
    """Label as spambot every account whose sequence contains the witness
    substring of ``lcs[k_star]``; everybody else, including accounts with
    empty timelines, is genuine.
    """
    sequences = _as_sequences(sequences)
    ids = [s.account_id for s in sequences]
    if k_star is None:
        return GroupSplit(None, "", (), {a: "genuine" for a in ids})
    curve_, gsa, seqs = _curve_and_index(sequences)
    curve = curve if curve is not None else curve_
    length = curve[k_star]
    witness = gsa.witness(k_star, length)
    flagged = {s.account_id for s in seqs if witness and witness in s.symbols}
    members = tuple(a for a in ids if a in flagged)
    if len(members) < k_star:
        raise AssertionError("witness found in fewer than k_star sequences")
    verdicts = {a: ("spambot" if a in flagged else "genuine") for a in ids}
    return GroupSplit(k_star, witness, members, verdicts)


class DnaEncoder(TransformerMixin, BaseEstimator):
    """Turn timelines (lists of tweets) into DNA strings."""

    def __init__(self, alphabet: DnaAlphabet | None = None):
        self.alphabet = alphabet

    def fit(self, X, y=None):
        self.alphabet_ = self.alphabet or DEFAULT_ALPHABET
        return self

    def transform(self, X):
        check_is_fitted(self, "alphabet_")
        out = []
        for timeline in X:
            timeline = list(timeline)
            owner = timeline[0].account_id if timeline else ""
            out.append(encode_account(owner, timeline, self.alphabet_).symbols)
        return np.array(out, dtype=object)


class LcsGroupDetector(ClusterMixin, BaseEstimator):
    """Unsupervised group detector over DNA strings.

    ``fit`` computes the similarity curve, the split point and the per-account
    labels (1 = spambot, 0 = genuine) in ``labels_``.

    Parameters
    ----------
    min_group : int
        Split points below this group size are ignored (treated as no split).
    """

    def __init__(self, min_group: int = 2):
        self.min_group = min_group

    def fit(self, X, y=None):
        X = [str(x) for x in X]
        if sum(1 for x in X if x) < 2:
            raise ValueError(f"{type(self).__name__} needs at least 2 non-empty sequences")
        seqs = [DnaSequence(str(i), s) for i, s in enumerate(X)]
        self.curve_ = lcs_curve(seqs)
        k_star = find_split(self.curve_)
        if k_star is not None and k_star < self.min_group:
            k_star = None
        if k_star is None:
            warnings.warn("similarity curve is flat; no group split found", stacklevel=2)
        self.k_star_ = k_star
        split = classify_group(seqs, self.curve_, k_star)
        self.witness_ = split.witness
        self.labels_ = np.array(
            [1 if split.verdicts[s.account_id] == "spambot" else 0 for s in seqs], dtype=int
        )
        return self
