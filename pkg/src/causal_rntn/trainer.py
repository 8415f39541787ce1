"""Dataset splitting, mini-batch AdaGrad training and model evaluation."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .checkpoint import Checkpoint
from .embeddings import (WEIGHTINGS, EmbeddingTable, Vocab, build_pos_table, init_random,
                         read_vectors, tag_pos)
from .labels import NUM_LABELS
from .metrics import EvalReport, score_trees
from .rntn import AdagradState, RntnParams, adagrad_step, gold_accuracy, greedy_parse, loss_and_grad
from .treebank import ParseTree

log = logging.getLogger(__name__)

LEARNING_RATES = (0.1, 0.01, 0.001, 0.0001)
MINI_BATCHES = (16, 24, 32, 64)
WVEC_DIMS = (30, 50, 60)
LOG_COLUMNS = "epoch\ttrain_loss\ttrain_acc\tval_acc"


class TooFewSentences(ValueError):
    pass


class NonFiniteLoss(RuntimeError):
    def __init__(self, epoch: int, batch: int, loss: float):
        super().__init__(f"non-finite loss {loss} in epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch
        self.loss = loss


class LabelSetMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# splitting


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 1290 / 1571
    val_frac: float = 140 / 1571
    test_frac: float = 141 / 1571
    stratify_by_label: bool = True
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train_frac, self.val_frac, self.test_frac)
        if any(f < 0 for f in fracs) or not math.isclose(sum(fracs), 1.0, abs_tol=1e-9):
            raise ValueError(f"split fractions must be non-negative and sum to 1: {fracs}")

    def sizes(self, n: int) -> tuple[int, int, int]:
        n_val = int(math.floor(self.val_frac * n + 0.5))
        n_test = int(math.floor(self.test_frac * n + 0.5))
        if self.val_frac > 0:
            n_val = max(n_val, 1)
        if self.test_frac > 0:
            n_test = max(n_test, 1)
        return n - n_val - n_test, n_val, n_test


@dataclass
class Split:
    train: list[ParseTree]
    val: list[ParseTree]
    test: list[ParseTree]
    max_label_deviation: float = 0.0
    """Largest gap between a label's share of segments in a split and in the whole corpus."""

    def __iter__(self) -> Iterator[list[ParseTree]]:
        return iter((self.train, self.val, self.test))


def _label_counts(tree: ParseTree) -> Counter:
    return Counter(node.label for node in tree.postorder())


def split_dataset(trees: Sequence[ParseTree], spec: SplitSpec = SplitSpec()) -> Split:
    n = len(trees)
    if n < 3:
        raise TooFewSentences(f"need at least 3 trees to split, got {n}")
    sizes = spec.sizes(n)
    if sizes[0] <= 0:
        raise TooFewSentences(f"{n} trees leave no training data at {spec}")
    rng = np.random.default_rng(spec.seed)
    order = [int(i) for i in rng.permutation(n)]
    assignment = [0] * n

    if not spec.stratify_by_label:
        bounds = (sizes[0], sizes[0] + sizes[1])
        for pos, i in enumerate(order):
            assignment[i] = 0 if pos < bounds[0] else (1 if pos < bounds[1] else 2)
    else:
        # Iterative stratification: place trees holding rare labels first,
        # each into the split that is furthest below its share of that label.
        counts = [_label_counts(t) for t in trees]
        total = Counter()
        for c in counts:
            total.update(c)
        fracs = [s / n for s in sizes]
        have = [Counter() for _ in range(3)]
        room = list(sizes)
        rank = {i: pos for pos, i in enumerate(order)}
        rarest = {i: min(total[lab] for lab in counts[i]) for i in range(n)}
        for i in sorted(range(n), key=lambda i: (rarest[i], rank[i])):
            rare = min(counts[i], key=lambda lab: (total[lab], lab.id))
            open_splits = [s for s in range(3) if room[s] > 0]
            best = max(open_splits, key=lambda s: (fracs[s] * total[rare] - have[s][rare],
                                                   room[s] / max(sizes[s], 1), -s))
            assignment[i] = best
            room[best] -= 1
            have[best].update(counts[i])

    parts: list[list[ParseTree]] = [[], [], []]
    for i in order:
        parts[assignment[i]].append(trees[i])
    return Split(*parts, max_label_deviation=_label_deviation(trees, parts))


def _label_deviation(trees, parts) -> float:
    def shares(ts):
        c = Counter()
        for t in ts:
            c.update(_label_counts(t))
        tot = sum(c.values())
        return {lab: v / tot for lab, v in c.items()} if tot else {}

    overall = shares(trees)
    worst = 0.0
    for part in parts:
        if not part:
            continue
        sub = shares(part)
        for lab, share in overall.items():
            worst = max(worst, abs(sub.get(lab, 0.0) - share))
    return worst


def kfold_splits(trees: Sequence[ParseTree], k: int = 10, seed: int = 0
                 ) -> list[tuple[list[ParseTree], list[ParseTree]]]:
    """(train, held-out) pairs for k-fold cross-validation."""
    if k < 2 or k > len(trees):
        raise ValueError(f"k must be in [2, {len(trees)}], got {k}")
    order = np.random.default_rng(seed).permutation(len(trees))
    folds = np.array_split(order, k)
    out = []
    for f in range(k):
        held = set(int(i) for i in folds[f])
        out.append(([trees[i] for i in order if int(i) not in held],
                    [trees[int(i)] for i in folds[f]]))
    return out


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainConfig:
    lr: float = 0.001
    mini_batch: int = 24
    wvec_dim: int = 60
    epochs: int = 90
    eps: float = 1e-8
    seed: int = 0
    embedding_mode: str = "random"  # random | pos50 | pos75 | pos100
    branching_data: str = "left"    # left | right | both
    init_range: float = 1e-4
    weight_scale: float = 0.05
    pretrained_path: str | None = None
    grid_mode: bool = False

    def __post_init__(self):
        if self.embedding_mode != "random" and self.embedding_mode not in WEIGHTINGS:
            raise ValueError(f"unknown embedding mode {self.embedding_mode!r}")
        if self.branching_data not in ("left", "right", "both"):
            raise ValueError(f"unknown branching {self.branching_data!r}")
        if self.lr <= 0 or self.mini_batch <= 0 or self.wvec_dim <= 0 or self.epochs < 0:
            raise ValueError("lr, mini_batch and wvec_dim must be positive, epochs >= 0")
        if self.grid_mode:
            if self.lr not in LEARNING_RATES:
                raise ValueError(f"lr must be one of {LEARNING_RATES} in grid mode")
            if self.mini_batch not in MINI_BATCHES:
                raise ValueError(f"mini_batch must be one of {MINI_BATCHES} in grid mode")
            if self.wvec_dim not in WVEC_DIMS:
                raise ValueError(f"wvec_dim must be one of {WVEC_DIMS} in grid mode")
        if self.embedding_mode != "random" and WEIGHTINGS[self.embedding_mode].dim != self.wvec_dim:
            raise ValueError(f"{self.embedding_mode} needs wvec_dim="
                             f"{WEIGHTINGS[self.embedding_mode].dim}")

    def header(self) -> str:
        return (f"# lr={self.lr} mb={self.mini_batch} dim={self.wvec_dim} "
                f"epochs={self.epochs} eps={self.eps} seed={self.seed} "
                f"embedding={self.embedding_mode} branching={self.branching_data}")


def hyperparameter_grid(**fixed) -> list[TrainConfig]:
    """Every (lr, mini batch, dimension) combination searched in the study."""
    return [TrainConfig(lr=lr, mini_batch=mb, wvec_dim=d, grid_mode=True, **fixed)
            for lr in LEARNING_RATES for mb in MINI_BATCHES for d in WVEC_DIMS]


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    train_acc: float
    val_acc: float

    def line(self) -> str:
        return f"{self.epoch}\t{self.train_loss:.6f}\t{self.train_acc:.6f}\t{self.val_acc:.6f}"


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    history: list[EpochRecord] = field(default_factory=list)
    header: str = ""

    def log_text(self) -> str:
        lines = [self.header, "# " + LOG_COLUMNS] + [r.line() for r in self.history]
        return "\n".join(lines) + "\n"


def _seeds(seed: int) -> tuple[int, int, int]:
    a, b, c = np.random.SeedSequence(seed).generate_state(3)
    return int(a), int(b), int(c)


def build_embeddings(trees: Sequence[ParseTree], cfg: TrainConfig, seed: int) -> EmbeddingTable:
    sentences = [t.words() for t in trees]
    if cfg.embedding_mode == "random":
        return init_random(Vocab.from_corpus(sentences), cfg.wvec_dim, cfg.init_range, seed)
    weighting = WEIGHTINGS[cfg.embedding_mode]
    pretrained = None
    if weighting.pretrained_dims:
        if cfg.pretrained_path is None:
            raise ValueError(f"{cfg.embedding_mode} needs a pre-trained vector file")
        pretrained = read_vectors(cfg.pretrained_path, weighting.pretrained_dims, truncate=True)
    tagged = [list(zip(s, tag_pos(s))) for s in sentences]
    table = build_pos_table(tagged, pretrained, weighting)
    if table.missing:
        log.warning("%d words have no pre-trained vector", len(table.missing))
    return table


def train(train_trees: Sequence[ParseTree], val_trees: Sequence[ParseTree],
          cfg: TrainConfig = TrainConfig(), embeddings: EmbeddingTable | None = None,
          on_epoch=None) -> TrainResult:
    """Mini-batch AdaGrad over gold-structure losses; keeps the best-validation epoch.

    Gradients of a mini-batch are summed in data order and divided by the
    batch size. Validation accuracy is node accuracy on the gold structure,
    checked once per epoch.
    """
    if not train_trees:
        raise ValueError("empty training set")
    emb_seed, weight_seed, order_seed = _seeds(cfg.seed)
    if embeddings is None:
        vocab_trees = list(train_trees) if cfg.embedding_mode == "random" \
            else list(train_trees) + list(val_trees)
        embeddings = build_embeddings(vocab_trees, cfg, emb_seed)
    params = RntnParams.initialize(embeddings, seed=weight_seed, scale=cfg.weight_scale)
    state = AdagradState(params)
    rng = np.random.default_rng(order_seed)
    header = cfg.header()
    meta = {"config": asdict(cfg), "epoch": 0, "val_accuracy": None, "train_accuracy": None}
    best = Checkpoint(params.copy(), None, dict(meta))
    best_val = -1.0
    history: list[EpochRecord] = []
    eval_val = val_trees if val_trees else train_trees

    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(train_trees))
        epoch_loss = 0.0
        correct = total = 0
        for b, start in enumerate(range(0, len(order), cfg.mini_batch)):
            batch = [train_trees[int(i)] for i in order[start:start + cfg.mini_batch]]
            loss, grads, n_correct, n_nodes = loss_and_grad(batch, params)
            if not math.isfinite(loss):
                raise NonFiniteLoss(epoch, b, loss)
            epoch_loss += loss
            correct += n_correct
            total += n_nodes
            adagrad_step(params, grads.scale(1.0 / len(batch)), state, cfg.lr, cfg.eps)
        # train accuracy is measured on each batch just before its update
        train_acc = correct / total
        _, val_acc = gold_accuracy(eval_val, params)
        record = EpochRecord(epoch, epoch_loss / len(train_trees), train_acc, val_acc)
        history.append(record)
        if on_epoch is not None:
            on_epoch(record)
        if val_acc > best_val:
            best_val = val_acc
            meta = {"config": asdict(cfg), "epoch": epoch, "val_accuracy": val_acc,
                    "train_accuracy": train_acc}
            best = Checkpoint(params.copy(), _copy_state(state, params), meta)
    return TrainResult(best, history, header)


def _copy_state(state: AdagradState, params: RntnParams) -> AdagradState:
    out = AdagradState(params)
    out.acc = {k: v.copy() for k, v in state.acc.items()}
    return out


# ---------------------------------------------------------------------------
# evaluation


def _params_of(model) -> RntnParams:
    return model.params if isinstance(model, Checkpoint) else model


def predict(model, sentences: Sequence[Sequence[str]], scoring: str = "max_prob"
            ) -> list[ParseTree]:
    params = _params_of(model)
    return [greedy_parse(words, params, scoring=scoring) for words in sentences]


def evaluate(model, test_trees: Sequence[ParseTree], scoring: str = "max_prob") -> EvalReport:
    """Greedy-parse each test sentence and score it against the gold tree.

    ``model`` may also be a list of already predicted trees, which are then
    scored directly.
    """
    if isinstance(model, (list, tuple)):
        return score_trees(model, test_trees)
    params = _params_of(model)
    if params.n_labels != NUM_LABELS:
        raise LabelSetMismatch(f"model has {params.n_labels} labels, treebank has {NUM_LABELS}")
    predicted = predict(params, [t.words() for t in test_trees], scoring)
    return score_trees(predicted, test_trees)


def cumulative_ngram_accuracy(model, test_trees: Sequence[ParseTree]) -> dict[int, float]:
    return evaluate(model, test_trees).cumulative_accuracy_by_ngram
