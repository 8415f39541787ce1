"""Evaluation metrics: node accuracy, per-label P/R/F1, cumulative n-gram
accuracy, inter-annotator agreement and treebank statistics."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .brat import StandoffDoc
from .labels import Label
from .treebank import ParseTree


def f1_score(precision: float, recall: float, beta: float = 1.0) -> float:
    """Weighted harmonic mean ``(1+b^2) R P / (b^2 P + R)``; 0 when undefined."""
    denom = beta * beta * precision + recall
    if denom == 0:
        return 0.0
    return (1 + beta * beta) * recall * precision / denom


@dataclass
class LabelScore:
    recall: float | None
    precision: float | None
    f1: float | None
    support: int
    predicted: int = 0


@dataclass
class EvalReport:
    node_accuracy: float
    per_label: dict[Label, LabelScore]
    mean_recall: float
    mean_precision: float
    mean_f1: float
    cumulative_accuracy_by_ngram: dict[int, float] = field(default_factory=dict)
    n_nodes: int = 0
    n_trees: int = 0

    def to_dict(self) -> dict:
        return {
            "node_accuracy": self.node_accuracy,
            "n_nodes": self.n_nodes,
            "n_trees": self.n_trees,
            "mean": {"recall": self.mean_recall, "precision": self.mean_precision,
                     "f1": self.mean_f1},
            "per_label": {
                lab.display: {"id": lab.id, "recall": s.recall, "precision": s.precision,
                              "f1": s.f1, "support": s.support, "predicted": s.predicted}
                for lab, s in self.per_label.items()
            },
            "cumulative_accuracy_by_ngram": {str(n): a for n, a in
                                             sorted(self.cumulative_accuracy_by_ngram.items())},
        }

    def format_table(self) -> str:
        def fmt(v):
            return "-" if v is None else f"{v:.2f}"

        width = max(len(lab.display) for lab in self.per_label) + 2
        lines = [f"{'Label':<{width}}{'Recall':>8}{'Precision':>11}{'F1':>8}{'Support':>9}"]
        for lab, s in self.per_label.items():
            lines.append(f"{lab.display:<{width}}{fmt(s.recall):>8}{fmt(s.precision):>11}"
                         f"{fmt(s.f1):>8}{s.support:>9}")
        lines.append(f"{'Mean':<{width}}{self.mean_recall:>8.2f}{self.mean_precision:>11.2f}"
                     f"{self.mean_f1:>8.2f}")
        lines.append(f"node accuracy: {self.node_accuracy:.4f} "
                     f"({self.n_nodes} nodes, {self.n_trees} trees)")
        return "\n".join(lines)


def _check_aligned(pred: ParseTree, gold: ParseTree) -> None:
    if pred.words() != gold.words():
        raise ValueError("predicted and gold trees cover different tokens")


def score_trees(predicted: Sequence[ParseTree], gold: Sequence[ParseTree]) -> EvalReport:
    """Compare predictions to gold by exact (span, label) match of nodes."""
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predictions for {len(gold)} gold trees")
    tp: Counter = Counter()
    n_pred: Counter = Counter()
    n_gold: Counter = Counter()
    correct_by_len: Counter = Counter()
    gold_by_len: Counter = Counter()
    for p, g in zip(predicted, gold):
        _check_aligned(p, g)
        gold_set = set(g.labeled_spans())
        for start, end, label in p.labeled_spans():
            n_pred[label] += 1
            if (start, end, label) in gold_set:
                tp[label] += 1
                correct_by_len[end - start] += 1
        for start, end, label in gold_set:
            n_gold[label] += 1
            gold_by_len[end - start] += 1

    per_label = {}
    for lab in Label:
        support = n_gold[lab]
        precision = tp[lab] / n_pred[lab] if n_pred[lab] else 0.0
        if support:
            recall = tp[lab] / support
            per_label[lab] = LabelScore(recall, precision, f1_score(precision, recall),
                                        support, n_pred[lab])
        else:
            per_label[lab] = LabelScore(None, None, None, 0, n_pred[lab])
    scored = [s for s in per_label.values() if s.support]
    total = sum(n_gold.values())

    cumulative = {}
    max_len = max(gold_by_len, default=0)
    run_correct = run_total = 0
    for n in range(1, max_len + 1):
        run_correct += correct_by_len[n]
        run_total += gold_by_len[n]
        cumulative[n] = run_correct / run_total if run_total else 1.0

    return EvalReport(
        node_accuracy=sum(tp.values()) / total if total else 0.0,
        per_label=per_label,
        mean_recall=_mean(s.recall for s in scored),
        mean_precision=_mean(s.precision for s in scored),
        mean_f1=_mean(s.f1 for s in scored),
        cumulative_accuracy_by_ngram=cumulative,
        n_nodes=total,
        n_trees=len(gold),
    )


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def cumulative_ngram_accuracy(predicted: Sequence[ParseTree],
                              gold: Sequence[ParseTree]) -> dict[int, float]:
    """Accuracy over gold nodes spanning at most ``n`` tokens, for every ``n``."""
    return score_trees(predicted, gold).cumulative_accuracy_by_ngram


# ---------------------------------------------------------------------------
# agreement


class NoOverlap(ValueError):
    def __init__(self, first: str, second: str):
        super().__init__(f"raters {first!r} and {second!r} share no sentences")
        self.raters = (first, second)


@dataclass(frozen=True)
class PairScore:
    precision: float
    recall: float
    f1: float


@dataclass
class AgreementReport:
    pairwise: dict[tuple[str, str], PairScore]
    """Keyed ``(gold_rater, subject_rater)``."""
    per_label_pairwise: dict[Label, dict[tuple[str, str], PairScore]]
    averaged_f1: float
    per_label_f1: dict[Label, float]

    def to_dict(self) -> dict:
        return {
            "averaged_f1": self.averaged_f1,
            "per_label_f1": {lab.display: v for lab, v in self.per_label_f1.items()},
            "pairwise": [{"gold": a, "subject": b, "precision": s.precision,
                          "recall": s.recall, "f1": s.f1}
                         for (a, b), s in self.pairwise.items()],
        }


def _span_set(docs: Mapping[str, StandoffDoc], keys) -> set[tuple[str, Label, int, int]]:
    return {(k, s.label, s.start, s.end) for k in keys for s in docs[k].spans}


def _pair_score(gold: set, subject: set) -> PairScore:
    hits = len(gold & subject)
    precision = hits / len(subject) if subject else 0.0
    recall = hits / len(gold) if gold else 0.0
    return PairScore(precision, recall, f1_score(precision, recall))


def inter_annotator_agreement(docs_by_rater: Mapping[str, Mapping[str, StandoffDoc]]
                              ) -> AgreementReport:
    """Pairwise span-level F1 between raters, averaged over rater pairs.

    ``docs_by_rater`` maps rater -> sentence id -> annotated doc. For each
    pair one rater is treated as gold; a span matches when label, start and
    end are identical.
    """
    raters = sorted(docs_by_rater)
    if len(raters) < 2:
        raise ValueError("agreement needs at least two raters")
    pairwise: dict[tuple[str, str], PairScore] = {}
    per_label: dict[Label, dict[tuple[str, str], PairScore]] = {}
    pair_f1 = []
    label_f1: dict[Label, list[float]] = {}
    for a, b in itertools.combinations(raters, 2):
        shared = sorted(set(docs_by_rater[a]) & set(docs_by_rater[b]))
        if not shared:
            raise NoOverlap(a, b)
        spans_a = _span_set(docs_by_rater[a], shared)
        spans_b = _span_set(docs_by_rater[b], shared)
        ab = _pair_score(spans_a, spans_b)
        pairwise[(a, b)] = ab
        pairwise[(b, a)] = _pair_score(spans_b, spans_a)
        pair_f1.append(ab.f1)
        for lab in sorted({s[1] for s in spans_a | spans_b}, key=lambda x: x.id):
            la = {s for s in spans_a if s[1] is lab}
            lb = {s for s in spans_b if s[1] is lab}
            score = _pair_score(la, lb)
            per_label.setdefault(lab, {})[(a, b)] = score
            per_label[lab][(b, a)] = _pair_score(lb, la)
            label_f1.setdefault(lab, []).append(score.f1)
    return AgreementReport(
        pairwise=pairwise,
        per_label_pairwise=per_label,
        averaged_f1=_mean(pair_f1),
        per_label_f1={lab: _mean(v) for lab, v in sorted(label_f1.items(), key=lambda x: x[0].id)},
    )


# ---------------------------------------------------------------------------
# treebank statistics


@dataclass
class TreebankStats:
    counts: dict[Label, int]
    total_segments: int
    n_sentences: int
    warnings: list[str] = field(default_factory=list)

    def format_table(self) -> str:
        lines = [f"{lab.display:<30}{self.counts.get(lab, 0):>8}" for lab in Label]
        lines.append(f"{'total segments':<30}{self.total_segments:>8}")
        lines.append(f"{'sentences':<30}{self.n_sentences:>8}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"counts": {lab.display: self.counts.get(lab, 0) for lab in Label},
                "total_segments": self.total_segments, "n_sentences": self.n_sentences,
                "warnings": self.warnings}


def treebank_stats(trees: Sequence[ParseTree]) -> TreebankStats:
    counts: Counter = Counter()
    for tree in trees:
        for node in tree.postorder():
            counts[node.label] += 1
    stats = TreebankStats({lab: counts[lab] for lab in Label}, sum(counts.values()), len(trees))
    roots = counts[Label.ROOT_SENTENCE]
    if roots != len(trees):
        stats.warnings.append(f"RootSentence occurs {roots} times in {len(trees)} trees")
    return stats


def split_stats(splits: Mapping[str, Sequence[ParseTree]]) -> dict[str, TreebankStats]:
    return {name: treebank_stats(trees) for name, trees in splits.items()}
