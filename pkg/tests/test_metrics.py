import numpy as np
import pytest
from hypothesis import given, strategies as st

from hinglish_bow.corpus import Label
from hinglish_bow.metrics import ConfusionMatrix, confusion, evaluate, report

NEG, NEU, POS = Label.NEGATIVE, Label.NEUTRAL, Label.POSITIVE


def test_perfect():
    rep = evaluate([POS, NEG, NEU], [POS, NEG, NEU])
    np.testing.assert_array_equal(rep.confusion.counts, np.eye(3, dtype=int))
    assert rep.accuracy == rep.macro_f1 == rep.weighted_f1 == 1.0
    assert all(s.precision == s.recall == s.f1 == 1.0 for s in rep.per_class)


def test_all_wrong():
    cm = confusion([POS, POS], [NEG, NEG])
    assert cm.counts[POS, NEG] == 2 and cm.total == 2
    assert report(cm).accuracy == 0.0


def test_input_errors():
    with pytest.raises(ValueError):
        confusion([POS], [POS, NEG])
    with pytest.raises(ValueError):
        confusion([], [])
    with pytest.raises(ValueError):
        report(ConfusionMatrix(np.zeros((3, 3), dtype=int)))


def test_hand_case():
    rep = evaluate([POS, POS, NEG, NEU], [POS, NEG, NEG, NEU])
    pos, neg, neu = rep.per_class[POS], rep.per_class[NEG], rep.per_class[NEU]
    assert pos.precision == 1.0 and pos.recall == 0.5 and pos.f1 == pytest.approx(2 / 3, abs=1e-15)
    assert neg.f1 == pytest.approx(2 / 3, abs=1e-15)
    assert neu.f1 == 1.0
    assert rep.macro_f1 == pytest.approx(7 / 9, abs=1e-15)
    assert rep.accuracy == 0.75
    assert rep.weighted_f1 == pytest.approx(0.75, abs=1e-15)
    assert rep.support == (1, 1, 2)


def test_absent_class_scores_zero():
    rep = evaluate([POS, NEG], [POS, NEG])
    assert rep.per_class[NEU].precision == rep.per_class[NEU].recall == rep.per_class[NEU].f1 == 0.0
    assert rep.macro_f1 == pytest.approx(2 / 3)


def test_serializations():
    rep = evaluate([POS, POS, NEG, NEU], [POS, NEG, NEG, NEU])
    kv = dict(line.split("=") for line in rep.to_key_value().splitlines())
    assert kv["accuracy"] == "0.750000"
    assert kv["macro_f1"] == "0.777778"
    assert kv["support_positive"] == "2"
    table = rep.to_table()
    assert "accuracy 0.7500" in table and "confusion" in table


pairs = st.lists(st.tuples(st.sampled_from(list(Label)), st.sampled_from(list(Label))), min_size=1, max_size=40)


@given(pairs, st.randoms(use_true_random=False))
def test_permutation_invariance_and_bounds(examples, rnd):
    golds, preds = zip(*examples)
    rep = evaluate(golds, preds)
    shuffled = list(examples)
    rnd.shuffle(shuffled)
    g2, p2 = zip(*shuffled)
    assert evaluate(g2, p2).key_values() == rep.key_values()
    assert 0 <= rep.macro_f1 <= 1 and 0 <= rep.weighted_f1 <= 1
    assert rep.accuracy == pytest.approx(np.trace(rep.confusion.counts) / len(examples))


@given(st.lists(st.integers(1, 50), min_size=3, max_size=3))
def test_diagonal_matrix_is_perfect(support):
    rep = report(ConfusionMatrix(np.diag(support)))
    assert rep.accuracy == rep.macro_f1 == rep.weighted_f1 == 1.0
