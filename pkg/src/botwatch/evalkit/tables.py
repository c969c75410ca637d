"""Replica tables built from fixtures and published reference values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import published
from .metrics import ConfusionMatrix, metrics_from_confusion
from .survival import OUTCOMES, SurvivabilityReport, significance_table


def table2_text(report: SurvivabilityReport) -> str:
    return report.to_text()


def table3_text(report: SurvivabilityReport, baseline: str = published.GENUINE,
                correction: bool = True) -> str:
    sig = significance_table(report, baseline, correction)
    lines = ["dataset\t" + "\t".join(OUTCOMES) + "\tp_alive\tp_deleted\tp_suspended"]
    for name, cells in sig.items():
        lines.append("\t".join(
            [name]
            + [cells[o].cell() for o in OUTCOMES]
            + [f"{cells[o].p_value:.3g}" for o in OUTCOMES]
        ))
    lines.append("*** p < 0.01, ** p < 0.05, * p < 0.1 (2x2 chi-square, 1 dof"
                 + (", Yates-corrected)" if correction else ")"))
    return "\n".join(lines) + "\n"


def table4_rows() -> list[dict]:
    """Accuracy of each crowdsourcing group re-derived from its printed counts."""
    rows = []
    for group, (n, tp, tn, fp, fn, acc, kappa) in published.CROWD_RESULTS.items():
        cm = ConfusionMatrix(tp, tn, fp, fn)
        rows.append({
            "type": group, "accounts": n, "tp": tp, "tn": tn, "fp": fp, "fn": fn,
            "accuracy": metrics_from_confusion(cm).accuracy,
            "printed_accuracy": acc, "printed_kappa": kappa,
        })
    return rows


def table4_text(rows: list[dict]) -> str:
    lines = ["type\taccounts\tTP\tTN\tFP\tFN\taccuracy\tkappa"]
    for r in rows:
        kappa = r.get("kappa", r.get("printed_kappa"))
        kappa_s = "undefined" if kappa is None else f"{kappa:.3f}"
        lines.append(f"{r['type']}\t{r['accounts']:,}\t{r['tp']:,}\t{r['tn']:,}\t{r['fp']:,}"
                     f"\t{r['fn']:,}\t{r['accuracy']:.4f}\t{kappa_s}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConsistencyRow:
    test_set: str
    technique: str
    printed: tuple[float, ...]  # P, R, Spec, Acc, F, MCC
    f_from_pr: float
    fitted: ConfusionMatrix
    fit_error: float

    @property
    def delta_f(self) -> float:
        return self.f_from_pr - self.printed[4]

    @property
    def fitted_accuracy(self) -> float:
        return (self.fitted.tp + self.fitted.tn) / self.fitted.total

    @property
    def delta_accuracy(self) -> float:
        return self.fitted_accuracy - self.printed[3]

    @property
    def delta_mcc(self) -> float:
        return metrics_from_confusion(self.fitted).mcc - self.printed[5]


def fit_confusion(precision: float, recall: float, specificity: float, accuracy: float,
                  max_pos: int, max_neg: int) -> tuple[ConfusionMatrix, float]:
    """Integer confusion matrix whose rates best match printed ones.

    Searches every positive/negative class size up to the test-set bounds,
    rounding tp and tn from recall and specificity, and minimizes the largest
    absolute deviation over the four rates. Ties prefer larger matrices.
    """
    n_pos = np.arange(1, max_pos + 1)[:, None].astype(float)
    n_neg = np.arange(1, max_neg + 1)[None, :].astype(float)
    tp = np.floor(recall * n_pos + 0.5)
    tn = np.floor(specificity * n_neg + 0.5)
    fp = n_neg - tn
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
    err = np.abs(p - precision)
    err = np.maximum(err, np.abs(tp / n_pos - recall))
    err = np.maximum(err, np.abs(tn / n_neg - specificity))
    err = np.maximum(err, np.abs((tp + tn) / (n_pos + n_neg) - accuracy))
    best = err.min()
    cand = np.argwhere(err <= best + 1e-15)
    size = cand.sum(axis=1)
    i, j = cand[np.argmax(size)]
    cm = ConfusionMatrix(int(tp[i, 0]), int(tn[0, j]), int(fp[0, j]),
                         int(n_pos[i, 0] - tp[i, 0]))
    return cm, float(best)


def table7_consistency() -> list[ConsistencyRow]:
    rows = []
    for test_set, technique, _kind, P, R, S, A, F, M in published.DETECTOR_RESULTS:
        n = published.TEST_SETS[test_set][1] // 2
        f = 2 * P * R / (P + R) if P + R else 0.0
        cm, err = fit_confusion(P, R, S, A, n, n)
        rows.append(ConsistencyRow(test_set, technique, (P, R, S, A, F, M), f, cm, err))
    return rows


def table7_text(rows: list[ConsistencyRow]) -> str:
    lines = ["test_set\ttechnique\tF_printed\tF_from_PR\tdF\tTP\tTN\tFP\tFN\tacc_printed\tacc_fit\tdAcc\tdMCC"]
    for r in rows:
        c = r.fitted
        lines.append(
            f"{r.test_set}\t{r.technique}\t{r.printed[4]:.3f}\t{r.f_from_pr:.4f}\t{r.delta_f:+.4f}"
            f"\t{c.tp}\t{c.tn}\t{c.fp}\t{c.fn}\t{r.printed[3]:.3f}\t{r.fitted_accuracy:.4f}"
            f"\t{r.delta_accuracy:+.4f}\t{r.delta_mcc:+.4f}"
        )
    max_f = max(abs(r.delta_f) for r in rows)
    max_a = max(abs(r.delta_accuracy) for r in rows)
    lines.append(f"max|dF|={max_f:.4f}\tmax|dAcc|={max_a:.4f}")
    return "\n".join(lines) + "\n"
