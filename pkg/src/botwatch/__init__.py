"""Group-level social spambot detection and evaluation toolkit."""

from .corpus import Account, LabeledDataset, TestSet, Tweet, build_test_set, load_dataset
from .disttest import DistributionTamperDetector, kl_divergence, tamper_test
from .dna import DnaEncoder, LcsGroupDetector, lcs_curve
from .graph import EntityFeatureExtractor, FastGreedyDetector, fastgreedy

__version__ = "0.1.0"

__all__ = [
    "Account",
    "DistributionTamperDetector",
    "DnaEncoder",
    "EntityFeatureExtractor",
    "FastGreedyDetector",
    "LabeledDataset",
    "LcsGroupDetector",
    "TestSet",
    "Tweet",
    "build_test_set",
    "fastgreedy",
    "kl_divergence",
    "lcs_curve",
    "load_dataset",
    "tamper_test",
]
