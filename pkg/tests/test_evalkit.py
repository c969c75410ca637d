from __future__ import annotations

import itertools
import warnings

import numpy as np
import pytest
from builders import make_account
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import fleiss_by_hand, metrics_by_formula
from scipy.stats import chi2_contingency
from statsmodels.stats.inter_rater import fleiss_kappa as sm_fleiss_kappa

from botwatch.evalkit import published
from botwatch.evalkit.annotations import (
    UNRESOLVED,
    Answer,
    UndefinedKappaError,
    analyze_campaign,
    fleiss_kappa,
    gate_contributors,
    majority_vote,
    read_answers,
)
from botwatch.evalkit.metrics import ConfusionMatrix, metrics_from_confusion, score_verdicts
from botwatch.evalkit.survival import (
    SurvivalCounts,
    chi_square_2x2,
    chi_square_effect,
    count_states,
    format_pct,
    stars_for,
)
from botwatch.evalkit.tables import fit_confusion, table4_rows, table7_consistency

# ---------------------------------------------------------------- metrics


def test_traditional_row_accuracy():
    m = metrics_from_confusion(ConfusionMatrix(1385, 0, 0, 131))
    assert round(m.accuracy, 4) == 0.9136


def test_perfect_classifier():
    m = metrics_from_confusion(ConfusionMatrix(50, 50, 0, 0))
    assert all(v == 1.0 for v in m.as_dict().values())


def test_fitted_digital_dna_matrix():
    cm = ConfusionMatrix(tp=963, tn=973, fp=18, fn=28)
    m = metrics_from_confusion(cm).as_dict()
    expected = metrics_by_formula(963, 973, 18, 28)
    for name, value in expected.items():
        assert m[name] == pytest.approx(value, abs=1e-12)
    for name, printed in {"precision": 0.982, "recall": 0.972, "accuracy": 0.976,
                          "f_measure": 0.977, "mcc": 0.952}.items():
        assert abs(m[name] - printed) <= 0.005, name


def test_all_zero_matrix():
    with pytest.raises(ValueError):
        metrics_from_confusion(ConfusionMatrix(0, 0, 0, 0))


def test_zero_denominators():
    m = metrics_from_confusion(ConfusionMatrix(0, 10, 0, 5))
    assert (m.precision, m.recall, m.f_measure, m.mcc) == (0.0, 0.0, 0.0, 0.0)
    assert m.specificity == 1.0


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.integers(0, 500)] * 4).filter(lambda t: sum(t) > 0))
def test_metric_identities(cells):
    cm = ConfusionMatrix(*cells)
    m = metrics_from_confusion(cm)
    assert m.accuracy == pytest.approx((cm.tp + cm.tn) / cm.total)
    assert -1.0 <= m.mcc <= 1.0
    if m.precision + m.recall:
        assert m.f_measure == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))


def test_score_verdicts_requires_coverage():
    with pytest.raises(KeyError, match="b"):
        score_verdicts({"a": "spambot", "b": "genuine"}, {"a": "spambot"})


# ---------------------------------------------------------------- survivability


def test_counts_and_cells():
    accounts = ([make_account(f"a{i}") for i in range(3353)]
                + [make_account(f"d{i}", code=50) for i in range(115)]
                + [make_account(f"s{i}", code=63) for i in range(6)])
    c = count_states("genuine_accounts", accounts)
    assert (c.alive, c.deleted, c.suspended, c.total) == (3353, 115, 6, 3474)
    assert c.cell("alive") == "3,353 (96.5%)"
    assert c.cell("deleted") == "115 (3.3%)"


def test_all_suspended():
    c = count_states("x", [make_account(f"s{i}", code=63) for i in range(7)])
    assert c.cell("suspended") == "7 (100.0%)"


def test_fake_followers_fixture(fixtures):
    from botwatch.corpus import load_dataset

    ff = load_dataset(fixtures / "fake_followers", tweets=False)
    c = count_states(ff.name, ff.accounts)
    assert format_pct(c.ratio("alive")) == "25.4%"
    assert format_pct(c.ratio("suspended")) == "73.5%"


def test_half_up_rounding():
    assert format_pct(0.0125) == "1.3%"
    assert format_pct(0.0124999) == "1.2%"


def test_stars():
    assert [stars_for(p) for p in (0.001, 0.02, 0.07, 0.2)] == ["***", "**", "*", ""]


@pytest.mark.parametrize("table", [[[946, 48], [3353, 121]], [[99, 1], [6, 3468]],
                                   [[12, 30], [40, 18]], [[5, 7], [9, 3]]])
@pytest.mark.parametrize("correction", [True, False])
def test_chi_square_matches_scipy(table, correction):
    stat, p = chi_square_2x2(table, correction=correction)
    ref = chi2_contingency(np.array(table), correction=correction)
    assert stat == pytest.approx(ref[0], rel=1e-10)
    assert p == pytest.approx(ref[1], rel=1e-10)


def test_chi_square_identical_groups():
    a = SurvivalCounts("a", 90, 5, 5)
    r = chi_square_effect(a, SurvivalCounts("b", 90, 5, 5), "alive")
    assert r.effect == 0.0 and r.p_value == 1.0 and r.stars == ""


def test_chi_square_zero_expected():
    with pytest.warns(RuntimeWarning):
        assert chi_square_2x2([[0, 10], [0, 20]]) == (0.0, 1.0)


def test_published_effect_examples():
    genuine = SurvivalCounts("genuine_accounts", *published.SURVIVAL_COUNTS["genuine_accounts"][1:])
    ss1 = SurvivalCounts("social_spambots_1", *published.SURVIVAL_COUNTS["social_spambots_1"][1:])
    ts2 = SurvivalCounts("traditional_spambots_2", *published.SURVIVAL_COUNTS["traditional_spambots_2"][1:])
    r = chi_square_effect(ss1, genuine, "alive")
    assert r.cell() == "-1.3%*"
    r = chi_square_effect(ts2, genuine, "suspended")
    assert r.effect == pytest.approx(98.83, abs=0.01)
    assert r.stars == "***"


# ---------------------------------------------------------------- annotations


def _gold(contributor: str, right: int, total: int) -> list[Answer]:
    return [Answer(f"g{i}", "gold", "spambot", contributor,
                   "spambot" if i < right else "genuine", True) for i in range(total)]


def test_gate_is_strict():
    answers = _gold("good", 8, 10) + _gold("edge", 7, 10)
    assert gate_contributors(answers) == {"good"}


def test_nobody_passes():
    answers = _gold("a", 5, 10) + _gold("b", 7, 10)
    assert gate_contributors(answers) == set()
    with pytest.raises(ValueError):
        majority_vote([])


def test_majority_vote_examples():
    assert majority_vote(["spambot", "spambot", "genuine"]) == "spambot"
    assert majority_vote(["spambot", "genuine", "unable_to_classify"]) == UNRESOLVED
    assert majority_vote(["genuine"] * 3) == "genuine"
    with pytest.raises(ValueError):
        majority_vote(["genuine", "genuine"])


KAPPA_EXAMPLE = [[3, 0], [0, 3], [2, 1], [1, 2]]


def test_fleiss_example_against_oracles():
    kappa = fleiss_kappa(KAPPA_EXAMPLE).kappa
    assert kappa == pytest.approx(float(fleiss_by_hand(KAPPA_EXAMPLE)), abs=1e-12)
    assert kappa == pytest.approx(sm_fleiss_kappa(np.array(KAPPA_EXAMPLE)), abs=1e-12)
    assert kappa == pytest.approx(1 / 3, abs=1e-12)


def test_fleiss_unanimous():
    assert fleiss_kappa([[3, 0], [0, 3]]).kappa == pytest.approx(1.0)


def test_fleiss_undefined():
    with pytest.raises(UndefinedKappaError):
        fleiss_kappa([[4, 0, 0], [4, 0, 0]])


def test_fleiss_unequal_raters():
    with pytest.raises(ValueError):
        fleiss_kappa([[3, 0], [1, 1]])


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.integers(2, 4), st.data())
def test_fleiss_invariances(raters, categories, data):
    rows = data.draw(st.lists(
        st.lists(st.integers(0, raters), min_size=categories - 1, max_size=categories - 1)
        .filter(lambda r: sum(r) <= raters)
        .map(lambda r: r + [raters - sum(r)]),
        min_size=2, max_size=8))
    try:
        base = fleiss_kappa(rows).kappa
    except UndefinedKappaError:
        return
    assert base == pytest.approx(float(fleiss_by_hand(rows)), abs=1e-9)
    # item order and category labels do not matter
    assert fleiss_kappa(rows[::-1]).kappa == pytest.approx(base, abs=1e-12)
    perm = data.draw(st.permutations(range(categories)))
    relabeled = [[r[j] for j in perm] for r in rows]
    assert fleiss_kappa(relabeled).kappa == pytest.approx(base, abs=1e-12)


def test_campaign_reproduces_crowd_table(fixtures):
    result = analyze_campaign(read_answers(fixtures / "annotations.csv"),
                              group_order=list(published.CROWD_RESULTS))
    assert len(result.trusted) <= published.CROWD_CONTRIBUTORS
    for g in result.groups:
        n, tp, tn, fp, fn, acc, _ = published.CROWD_RESULTS[g.group]
        assert (g.confusion.tp, g.confusion.tn, g.confusion.fp, g.confusion.fn) == (tp, tn, fp, fn)
        assert round(g.accuracy, 4) == acc
        assert g.accounts == n


def test_campaign_small():
    answers = _gold("c1", 9, 10) + _gold("c2", 9, 10) + _gold("c3", 8, 10) + _gold("bad", 2, 10)
    for c, ans in zip(("c1", "c2", "c3", "bad"), ("spambot", "spambot", "genuine", "genuine")):
        answers.append(Answer("acc", "social_spambots", "spambot", c, ans, False))
    result = analyze_campaign(answers)
    assert result.final == {"acc": "spambot"}
    assert "bad" not in result.trusted


# ---------------------------------------------------------------- tables


def test_table4_accuracies():
    assert [round(r["accuracy"], 4) for r in table4_rows()] == [0.9136, 0.2355, 0.9201]


def test_fit_confusion_recovers_known_matrix():
    cm = ConfusionMatrix(963, 973, 18, 28)
    m = metrics_from_confusion(cm)
    fitted, err = fit_confusion(round(m.precision, 3), round(m.recall, 3), round(m.specificity, 3),
                                round(m.accuracy, 3), 991, 991)
    assert err <= 0.0005
    assert abs(metrics_from_confusion(fitted).accuracy - m.accuracy) <= 0.001


def test_accuracy_bounded_by_recall_and_specificity():
    # any matrix: accuracy is a weighted mean of recall and specificity
    for tp, fn, tn, fp in itertools.product((0, 3, 10), (1, 4), (0, 5, 9), (1, 2)):
        m = metrics_from_confusion(ConfusionMatrix(tp, tn, fp, fn))
        lo, hi = sorted((m.recall, m.specificity))
        assert lo - 1e-12 <= m.accuracy <= hi + 1e-12


def test_table7_f_consistency():
    rows = table7_consistency()
    assert len(rows) == len(published.DETECTOR_RESULTS)
    assert max(abs(r.delta_f) for r in rows) <= 0.001


def test_chi_square_shape():
    with pytest.raises(ValueError):
        chi_square_2x2([[1, 2, 3], [4, 5, 6]])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        chi_square_2x2([[1, 2], [3, 4]])
