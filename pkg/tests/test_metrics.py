import numpy as np
import pytest

from causal_rntn.brat import parse_standoff
from causal_rntn.labels import Label
from causal_rntn.metrics import (NoOverlap, f1_score, inter_annotator_agreement, score_trees,
                                 split_stats, treebank_stats)
from causal_rntn.trainer import evaluate
from causal_rntn.treebank import parse_bracketed

from .helpers import random_tree


def test_f1_hand_values():
    assert abs(f1_score(0.8, 0.8) - 0.8) <= 1e-9
    assert abs(f1_score(1.0, 0.5) - 2 / 3) <= 1e-9
    assert abs(f1_score(1.0, 0.5) - 0.6667) <= 1e-4
    assert f1_score(0.0, 0.0) == 0.0
    # beta = 2: 5 * 0.5 * 1 / (4 * 1 + 0.5) with precision 1, recall 0.5
    assert f1_score(1.0, 0.5, beta=2) == pytest.approx(2.5 / 4.5)


GOLD = "(1 (10 (9 A) (8 (23 is) (23 true))) (3 .))"
#            ^ statement    ^ condition
PRED = "(1 (9 (9 A) (23 is)) (8 (23 true) (3 .)))"


def test_score_hand_example():
    rep = score_trees([parse_bracketed(PRED)], [parse_bracketed(GOLD)])
    # gold nodes: A/9, is/23, true/23, ./3, is-true/8, A-is-true/10, root/1 = 7
    # matched: A, is, true, ., root = 5
    assert rep.n_nodes == 7
    assert rep.node_accuracy == pytest.approx(5 / 7)
    cond = rep.per_label[Label.CONDITION]
    assert (cond.recall, cond.precision, cond.f1, cond.support) == (0.0, 0.0, 0.0, 1)
    var = rep.per_label[Label.VARIABLE]
    # gold has one Variable, predicted two (A and A-is)
    assert (var.recall, var.precision) == (1.0, 0.5)
    assert var.f1 == pytest.approx(2 / 3)
    assert rep.per_label[Label.CAUSE].recall is None
    # by length: 1-grams 4/4, 2-grams 0/1, 3-grams 0/1, 4-grams 1/1
    assert rep.cumulative_accuracy_by_ngram == pytest.approx({1: 1.0, 2: 0.8, 3: 4 / 6, 4: 5 / 7})
    labelled = [s for s in rep.per_label.values() if s.support]
    assert rep.mean_recall == pytest.approx(sum(s.recall for s in labelled) / len(labelled))


def test_gold_vs_gold(reference_strings, reference_trees):
    rep = evaluate(list(reference_trees), reference_trees)
    assert rep.node_accuracy == 1.0 and rep.mean_f1 == 1.0
    assert all(v == 1.0 for v in rep.cumulative_accuracy_by_ngram.values())
    assert "Mean" in rep.format_table()
    n_cause = sum(s.replace("(", " ( ").split().count("11") for s in reference_strings)
    assert rep.to_dict()["per_label"]["Cause"]["support"] == n_cause


def test_cumulative_at_max_equals_node_accuracy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        gold, pred = [], []
        for _ in range(int(rng.integers(1, 6))):
            g = random_tree(rng, int(rng.integers(1, 9)))
            gold.append(g)
            pred.append(random_tree(rng, g.n_leaves, g.words()))
        rep = score_trees(pred, gold)
        cum = rep.cumulative_accuracy_by_ngram
        assert cum[max(cum)] == rep.node_accuracy


def test_misaligned_trees_rejected():
    with pytest.raises(ValueError):
        score_trees([parse_bracketed("(23 a)")], [parse_bracketed("(23 b)")])


TEXT = "If A is true, B fails."


def docs(*spans):
    return {"s1": parse_standoff("".join(f"T{i}\t{s}\n" for i, s in enumerate(spans, 1)), TEXT)}


def test_agreement_hand_example():
    a = docs("Variable 3 4\tA", "Condition 5 12\tis true", "Variable 14 15\tB")
    b = docs("Variable 3 4\tA", "Statement 3 12\tA is true")
    rep = inter_annotator_agreement({"a": a, "b": b})
    # a as gold: 1 hit, recall 1/3, precision 1/2
    assert rep.pairwise[("a", "b")].recall == pytest.approx(1 / 3)
    assert rep.pairwise[("a", "b")].precision == pytest.approx(1 / 2)
    assert rep.averaged_f1 == pytest.approx(f1_score(0.5, 1 / 3))
    assert rep.per_label_f1[Label.VARIABLE] == pytest.approx(f1_score(1.0, 0.5))
    assert rep.per_label_f1[Label.STATEMENT] == 0.0


def test_agreement_averages_pairs():
    a = docs("Variable 3 4\tA")
    c = docs("Variable 14 15\tB")
    rep = inter_annotator_agreement({"a": a, "b": a, "c": c})
    assert rep.averaged_f1 == pytest.approx((1 + 0 + 0) / 3)


def test_agreement_no_overlap():
    a = docs("Variable 3 4\tA")
    with pytest.raises(NoOverlap):
        inter_annotator_agreement({"a": a, "b": {"other": a["s1"]}})


def test_stats(reference_trees):
    stats = treebank_stats(reference_trees)
    assert stats.n_sentences == 4
    assert stats.total_segments == sum(t.n_nodes for t in reference_trees)
    assert stats.counts[Label.ROOT_SENTENCE] == 4 and not stats.warnings
    both = split_stats({"train": reference_trees[:3], "test": reference_trees[3:]})
    assert both["train"].total_segments + both["test"].total_segments == stats.total_segments


def test_stats_flags_extra_root():
    t = parse_bracketed("(1 (1 (23 a) (23 b)) (3 .))")
    assert treebank_stats([t]).warnings
