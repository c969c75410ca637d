"""Binary detection metrics (positive class = spambot)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping

import numpy as np

METRIC_NAMES = ("precision", "recall", "specificity", "accuracy", "f_measure", "mcc")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_labels(cls, y_true: Iterable[int], y_pred: Iterable[int]) -> "ConfusionMatrix":
        t = np.asarray(list(y_true), dtype=int)
        p = np.asarray(list(y_pred), dtype=int)
        if t.shape != p.shape:
            raise ValueError("y_true and y_pred differ in length")
        return cls(
            tp=int(np.sum((t == 1) & (p == 1))),
            tn=int(np.sum((t == 0) & (p == 0))),
            fp=int(np.sum((t == 0) & (p == 1))),
            fn=int(np.sum((t == 1) & (p == 0))),
        )


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    specificity: float
    accuracy: float
    f_measure: float
    mcc: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def row(self, digits: int = 3) -> list[str]:
        return [f"{getattr(self, m):.{digits}f}" for m in METRIC_NAMES]


def _ratio(num: float, den: float) -> float:
    # zero denominators give 0 by convention
    return num / den if den else 0.0


def metrics_from_confusion(cm: ConfusionMatrix) -> MetricsReport:
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    tp, tn, fp, fn = cm.tp, cm.tn, cm.fp, cm.fn
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    den = math.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    report = MetricsReport(
        precision=precision,
        recall=recall,
        specificity=_ratio(tn, tn + fp),
        accuracy=(tp + tn) / cm.total,
        f_measure=_ratio(2 * precision * recall, precision + recall),
        mcc=_ratio(tp * tn - fp * fn, den),
    )
    check_identities(cm, report)
    return report


def check_identities(cm: ConfusionMatrix, r: MetricsReport, tol: float = 1e-12) -> None:
    if abs(r.accuracy - (cm.tp + cm.tn) / cm.total) > tol:
        raise AssertionError("accuracy identity violated")
    if r.precision + r.recall > 0:
        f = 2 * r.precision * r.recall / (r.precision + r.recall)
        if abs(r.f_measure - f) > tol:
            raise AssertionError("F-measure identity violated")
    for name in METRIC_NAMES[:5]:
        if not 0.0 <= getattr(r, name) <= 1.0:
            raise AssertionError(f"{name} outside [0, 1]")
    if not -1.0 - tol <= r.mcc <= 1.0 + tol:
        raise AssertionError("mcc outside [-1, 1]")


def score_verdicts(truth: Mapping[str, str], verdicts: Mapping[str, str]) -> ConfusionMatrix:
    """Confusion matrix of spambot/genuine verdicts against ground truth.

    Every ground-truth id must have a verdict.
    """
    missing = sorted(set(truth) - set(verdicts))
    if missing:
        raise KeyError(f"no verdict for {len(missing)} accounts: {missing[:20]}")
    ids = list(truth)
    y_true = [1 if truth[i] == "spambot" else 0 for i in ids]
    y_pred = [1 if verdicts[i] == "spambot" else 0 for i in ids]
    return ConfusionMatrix.from_labels(y_true, y_pred)
