from __future__ import annotations

import random
import warnings

import numpy as np
import pytest
from builders import make_timeline
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_lcs, window_lcs
from sklearn.base import clone

from botwatch.dna import (
    DnaAlphabet,
    DnaEncoder,
    DnaSequence,
    GeneralizedSuffixArray,
    LcsGroupDetector,
    SimilarityCurve,
    classify_group,
    encode_account,
    find_split,
    lcs_curve,
)
from botwatch.dna.suffix import lcp_array, suffix_array

dna = st.text(alphabet="ACT", min_size=1, max_size=24)


def planted(seed: int = 7, n_bots: int = 10, n_genuine: int = 10, block: int = 200):
    """Bots share one random block inside random flanks; genuine accounts are random."""
    rng = random.Random(seed)
    rand = lambda n: "".join(rng.choice("ACT") for _ in range(n))  # noqa: E731
    shared = rand(block)
    seqs = [DnaSequence(f"bot{i}", rand(rng.randint(20, 120)) + shared + rand(rng.randint(20, 120)))
            for i in range(n_bots)]
    seqs += [DnaSequence(f"gen{i}", rand(rng.randint(250, 400))) for i in range(n_genuine)]
    order = list(range(len(seqs)))
    rng.shuffle(order)
    return [seqs[i] for i in order], shared


def test_suffix_array_matches_sorting():
    text = "mississippi$"
    codes = np.array([ord(c) for c in text])
    sa = suffix_array(codes)
    assert list(sa) == sorted(range(len(text)), key=lambda i: text[i:])
    lcp = lcp_array(codes, sa)
    for r in range(1, len(sa)):
        a, b = text[sa[r - 1]:], text[sa[r]:]
        n = 0
        while n < min(len(a), len(b)) and a[n] == b[n]:
            n += 1
        assert lcp[r] == n


def test_banana():
    curve = lcs_curve(["banana", "ananas", "nana"])
    assert curve[2] == 5
    assert curve[3] == 4
    assert GeneralizedSuffixArray(["banana", "ananas", "nana"]).witness(3, 4) == "nana"


@pytest.mark.parametrize("n,length", [(2, 1), (5, 17), (9, 40)])
def test_identical_sequences(n, length):
    s = "".join(random.Random(length).choice("ACT") for _ in range(length))
    curve = lcs_curve([s] * n)
    assert list(curve.lcs) == [length] * (n - 1)


def test_disjoint_symbols():
    assert lcs_curve(["AAA", "CCC", "TTT"]).as_dict() == {2: 0, 3: 0}


def test_needs_two_non_empty():
    with pytest.raises(ValueError):
        lcs_curve(["ACT"])
    with pytest.raises(ValueError):
        lcs_curve(["ACT", "", ""])


def test_empty_sequences_are_ignored_by_curve():
    assert lcs_curve(["ACTA", "", "CTAA"]).as_dict() == {2: 3}


@settings(max_examples=60, deadline=None)
@given(st.lists(dna, min_size=2, max_size=6), st.randoms(use_true_random=False))
def test_curve_is_permutation_invariant(seqs, rnd):
    shuffled = list(seqs)
    rnd.shuffle(shuffled)
    assert lcs_curve(seqs).as_dict() == lcs_curve(shuffled).as_dict()


@settings(max_examples=60, deadline=None)
@given(st.lists(dna, min_size=2, max_size=6))
def test_curve_agrees_with_brute_force(seqs):
    curve = lcs_curve(seqs)
    assert all(np.diff(curve.lcs) <= 0)
    for k in curve.ks:
        assert curve[k] == brute_lcs(seqs, int(k))


@settings(max_examples=40, deadline=None)
@given(st.lists(dna, min_size=2, max_size=6))
def test_witness_is_shared(seqs):
    gsa = GeneralizedSuffixArray(seqs)
    by_k = gsa.lcs_by_k()
    for k in range(2, len(seqs) + 1):
        w = gsa.witness(k, int(by_k[k]))
        assert len(w) == by_k[k]
        assert sum(w in s for s in seqs) >= k


def test_curve_rejects_increase():
    with pytest.raises(AssertionError):
        SimilarityCurve(np.array([2, 3]), np.array([4, 5]))


def test_find_split_examples():
    curve = SimilarityCurve(np.array([2, 3, 4, 5]), np.array([100, 98, 10, 9]))
    assert find_split(curve) == 3
    flat = SimilarityCurve(np.array([2, 3, 4]), np.array([50, 50, 50]))
    assert find_split(flat) is None


def test_find_split_ties_go_to_larger_k():
    curve = SimilarityCurve(np.array([2, 3, 4, 5]), np.array([30, 20, 20, 10]))
    assert find_split(curve) == 4


def test_planted_curve_and_split():
    seqs, shared = planted()
    strings = [s.symbols for s in seqs]
    curve = lcs_curve(seqs)
    for k in (2, 9, 10, 11, 20):
        assert curve[k] == window_lcs(strings, k)
    assert curve[10] >= len(shared)
    assert find_split(curve) == 10


def test_planted_classification():
    seqs, shared = planted()
    split = classify_group(seqs, k_star=find_split(lcs_curve(seqs)))
    assert shared in split.witness or split.witness in shared
    flagged = {a for a, v in split.verdicts.items() if v == "spambot"}
    assert flagged == {s.account_id for s in seqs if s.account_id.startswith("bot")}


def test_identical_group_all_spambot():
    seqs = [DnaSequence(f"a{i}", "ACCTA" * 8) for i in range(6)]
    split = classify_group(seqs, k_star=len(seqs))
    assert set(split.verdicts.values()) == {"spambot"}


def test_no_split_all_genuine():
    split = classify_group(["ACT", "TCA", "CAT"], k_star=None)
    assert set(split.verdicts.values()) == {"genuine"}
    assert split.k_star is None


def test_empty_timeline_is_genuine():
    seqs = [DnaSequence("a", "ACTACT"), DnaSequence("b", "ACTACT"), DnaSequence("c", "")]
    split = classify_group(seqs, k_star=2)
    assert split.verdicts == {"a": "spambot", "b": "spambot", "c": "genuine"}


def test_encode_direct_mapping():
    tweets = make_timeline("u", "ptr")
    assert encode_account("u", tweets).symbols == "ATC"


def test_encode_orders_by_time():
    tweets = make_timeline("u", "ptr")
    assert encode_account("u", tweets[::-1]).symbols == "ATC"


def test_encode_edge_cases():
    assert encode_account("u", []).symbols == ""
    assert encode_account("u", make_timeline("u", "t" * 100)).symbols == "T" * 100


def test_encode_rejects_foreign_tweets():
    with pytest.raises(ValueError):
        encode_account("u", make_timeline("v", "p"))


def test_custom_alphabet():
    abc = DnaAlphabet({"plain": "x", "reply": "y", "retweet": "z"})
    assert encode_account("u", make_timeline("u", "prt"), abc).symbols == "xyz"


@pytest.mark.parametrize("mapping", [
    {"plain": "A", "reply": "A", "retweet": "T"},
    {"plain": "A", "reply": "C"},
    {"plain": "A", "reply": "C", "retweet": "$"},
    {"plain": "AB", "reply": "C", "retweet": "T"},
])
def test_bad_alphabet(mapping):
    with pytest.raises(ValueError):
        DnaAlphabet(mapping)


def test_encoder_and_detector_estimators():
    seqs, _ = planted(seed=3)
    det = LcsGroupDetector().fit([s.symbols for s in seqs])
    truth = np.array([s.account_id.startswith("bot") for s in seqs], dtype=int)
    assert np.array_equal(det.labels_, truth)
    assert det.k_star_ == 10
    assert np.array_equal(det.fit_predict([s.symbols for s in seqs]), truth)

    params = LcsGroupDetector(min_group=4).get_params()
    assert params == {"min_group": 4}
    assert clone(LcsGroupDetector(min_group=4)).min_group == 4

    enc = DnaEncoder().fit(None)
    out = enc.transform([make_timeline("u", "prt"), []])
    assert list(out) == ["ACT", ""]


def test_detector_warns_on_flat_curve():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        det = LcsGroupDetector().fit(["ACTG"[:3]] * 4)
    assert det.k_star_ is None
    assert det.labels_.sum() == 0
    assert any("flat" in str(w.message) for w in caught)
