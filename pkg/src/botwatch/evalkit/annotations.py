"""Crowdsourced annotation analytics: contributor gating, majority vote, Fleiss' kappa."""

from __future__ import annotations

import csv
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .metrics import ConfusionMatrix

logger = logging.getLogger(__name__)

ANSWERS = ("spambot", "genuine", "unable_to_classify")
UNRESOLVED = "unresolved"
ANNOTATION_COLUMNS = ("account_id", "group", "truth", "contributor_id", "answer", "gold")
MIN_ANSWERS = 3


class UndefinedKappaError(ValueError):
    """Chance agreement is 1, so kappa has no value."""


@dataclass(frozen=True)
class Answer:
    account_id: str
    group: str
    truth: str
    contributor_id: str
    answer: str
    gold: bool

    def __post_init__(self):
        if self.answer not in ANSWERS:
            raise ValueError(f"unknown answer {self.answer!r}")


def read_answers(path: str | Path) -> list[Answer]:
    path = Path(path)
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ANNOTATION_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        for row in reader:
            try:
                out.append(Answer(row["account_id"], row["group"], row["truth"],
                                  row["contributor_id"], row["answer"],
                                  row["gold"].strip() in ("1", "true", "True")))
            except ValueError as exc:
                raise ValueError(f"{path}:{reader.line_num}: {exc}") from exc
    return out


def gold_accuracy(answers: Iterable[Answer]) -> dict[str, float]:
    right, seen = Counter(), Counter()
    for a in answers:
        if a.gold:
            seen[a.contributor_id] += 1
            right[a.contributor_id] += a.answer == a.truth
    return {c: right[c] / seen[c] for c in seen}


def gate_contributors(answers: Iterable[Answer], min_accuracy: float = 0.70) -> set[str]:
    """Contributors whose gold-question accuracy is strictly above ``min_accuracy``."""
    answers = list(answers)
    scores = gold_accuracy(answers)
    ungraded = {a.contributor_id for a in answers} - set(scores)
    if ungraded:
        raise ValueError(f"contributors without gold answers: {sorted(ungraded)[:10]}")
    return {c for c, s in scores.items() if s > min_accuracy}


def majority_vote(answers: Sequence[str]) -> str:
    """Strict-majority class, or ``"unresolved"`` when no class has one."""
    if len(answers) < MIN_ANSWERS:
        raise ValueError(f"majority vote needs at least {MIN_ANSWERS} answers, got {len(answers)}")
    label, votes = Counter(answers).most_common(1)[0]
    return label if votes * 2 > len(answers) else UNRESOLVED


@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    n_categories: int
    raters_per_item: int
    n_items: int


def fleiss_kappa(counts) -> AgreementReport:
    """Fleiss' kappa for an items x categories count matrix.

    Every row must sum to the same number of raters n >= 2.
    """
    M = np.asarray(counts, dtype=float)
    if M.ndim != 2 or M.shape[0] == 0:
        raise ValueError("expected a non-empty items x categories matrix")
    n = M.sum(axis=1)
    if not np.all(n == n[0]) or n[0] < 2:
        raise ValueError("every item needs the same number (>= 2) of raters")
    n = n[0]
    N = M.shape[0]
    p_j = M.sum(axis=0) / (N * n)
    P_i = (np.sum(M * M, axis=1) - n) / (n * (n - 1))
    P_bar = P_i.mean()
    P_e = float(np.sum(p_j * p_j))
    if np.isclose(P_e, 1.0):
        raise UndefinedKappaError("all ratings fall in one category; kappa is undefined")
    return AgreementReport(float((P_bar - P_e) / (1 - P_e)), M.shape[1], int(n), N)


def rating_matrix(per_item: Mapping[str, Sequence[str]],
                  categories: Sequence[str] = ANSWERS) -> np.ndarray:
    """Count matrix using the earliest n answers of each item, n = fewest answers of any item."""
    n = min(len(v) for v in per_item.values())
    col = {c: j for j, c in enumerate(categories)}
    M = np.zeros((len(per_item), len(categories)), dtype=int)
    for i, answers in enumerate(per_item.values()):
        for a in answers[:n]:
            M[i, col[a]] += 1
    return M


@dataclass(frozen=True)
class GroupResult:
    group: str
    accounts: int
    confusion: ConfusionMatrix
    accuracy: float
    kappa: float | None


@dataclass(frozen=True)
class CampaignResult:
    trusted: frozenset
    final: dict[str, str]
    dropped: tuple[str, ...]
    groups: tuple[GroupResult, ...]


def analyze_campaign(answers: Sequence[Answer], min_accuracy: float = 0.70,
                     group_order: Sequence[str] | None = None) -> CampaignResult:
    """Gate contributors, vote per account and score each ground-truth group.

    Accounts with fewer than 3 trusted answers are dropped. Accounts whose final
    class is unable_to_classify or unresolved are left out of the confusion
    matrices.
    """
    trusted = gate_contributors(answers, min_accuracy)
    if not trusted:
        raise ValueError("no contributor passed the gold-question gate")
    per_account: dict[str, list[str]] = defaultdict(list)
    meta: dict[str, tuple[str, str]] = {}
    for a in answers:
        if a.gold or a.contributor_id not in trusted:
            continue
        per_account[a.account_id].append(a.answer)
        meta[a.account_id] = (a.group, a.truth)

    dropped = tuple(sorted(k for k, v in per_account.items() if len(v) < MIN_ANSWERS))
    if dropped:
        logger.info("dropping %d accounts with fewer than %d trusted answers", len(dropped), MIN_ANSWERS)
    kept = {k: v for k, v in per_account.items() if len(v) >= MIN_ANSWERS}
    final = {k: majority_vote(v) for k, v in kept.items()}

    groups = list(group_order) if group_order else sorted({meta[k][0] for k in kept})
    results = []
    for g in groups:
        ids = [k for k in kept if meta[k][0] == g]
        scored = [k for k in ids if final[k] in ("spambot", "genuine")]
        truth = [1 if meta[k][1] == "spambot" else 0 for k in scored]
        pred = [1 if final[k] == "spambot" else 0 for k in scored]
        cm = ConfusionMatrix.from_labels(truth, pred)
        try:
            kappa = fleiss_kappa(rating_matrix({k: kept[k] for k in ids})).kappa if ids else None
        except UndefinedKappaError:
            kappa = None
        acc = (cm.tp + cm.tn) / cm.total if cm.total else 0.0
        results.append(GroupResult(g, len(scored), cm, acc, kappa))
    return CampaignResult(frozenset(trusted), final, dropped, tuple(results))
