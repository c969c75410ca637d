from .detector import (
    DEFAULT_ALPHABET,
    DnaAlphabet,
    DnaEncoder,
    DnaSequence,
    GroupSplit,
    LcsGroupDetector,
    SimilarityCurve,
    classify_group,
    encode_account,
    find_split,
    lcs_curve,
)
from .suffix import GeneralizedSuffixArray

__all__ = [
    "DEFAULT_ALPHABET",
    "DnaAlphabet",
    "DnaEncoder",
    "DnaSequence",
    "GeneralizedSuffixArray",
    "GroupSplit",
    "LcsGroupDetector",
    "SimilarityCurve",
    "classify_group",
    "encode_account",
    "find_split",
    "lcs_curve",
]
