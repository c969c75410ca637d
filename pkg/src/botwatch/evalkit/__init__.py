from .annotations import fleiss_kappa, gate_contributors, majority_vote
from .metrics import ConfusionMatrix, MetricsReport, metrics_from_confusion
from .survival import SurvivalCounts, chi_square_effect, survivability

__all__ = [
    "ConfusionMatrix",
    "MetricsReport",
    "SurvivalCounts",
    "chi_square_effect",
    "fleiss_kappa",
    "gate_contributors",
    "majority_vote",
    "metrics_from_confusion",
    "survivability",
]
