"""Recursive Neural Tensor Network over labeled binary trees.

A parent vector is ``tanh(x^T V x + W x)`` with ``x = [left; right]``; every
node, leaves included, is classified by ``softmax(C p)``. Training follows
the gold tree structure and minimises the summed cross-entropy over all
nodes; inference builds the tree greedily from adjacent pairs.

Tensor layout: ``V`` has shape ``(2d, 2d, d)``, so slice ``k`` is
``V[:, :, k]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingTable
from .labels import NUM_LABELS, TOKEN_LABELS, Label
from .treebank import ParseTree, Token

LABELS = tuple(Label)  # class index i <-> LABELS[i]
_INTERNAL_MASK = np.array([lab not in TOKEN_LABELS for lab in LABELS])


def label_index(label: Label) -> int:
    return label.id - 1


def activation(z):
    return np.tanh(z)


def activation_grad(a):
    """Derivative of the activation expressed through its output."""
    return 1.0 - a * a


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - np.max(z, axis=-1, keepdims=True)
    return z - np.log(np.sum(np.exp(z), axis=-1, keepdims=True))


class EmptyInput(ValueError):
    pass


@dataclass
class RntnParams:
    V: np.ndarray
    W: np.ndarray
    C: np.ndarray
    embeddings: EmbeddingTable

    def __post_init__(self):
        d = self.W.shape[0]
        if self.V.shape != (2 * d, 2 * d, d):
            raise ValueError(f"V must have shape {(2 * d, 2 * d, d)}, got {self.V.shape}")
        if self.W.shape != (d, 2 * d):
            raise ValueError(f"W must have shape {(d, 2 * d)}, got {self.W.shape}")
        if self.C.shape[1] != d:
            raise ValueError(f"C must have {d} columns, got {self.C.shape}")
        if self.embeddings.dim != d:
            raise ValueError(f"embedding dim {self.embeddings.dim} != {d}")

    @property
    def d(self) -> int:
        return self.W.shape[0]

    @property
    def n_labels(self) -> int:
        return self.C.shape[0]

    @property
    def L(self) -> np.ndarray:
        return self.embeddings.matrix

    @classmethod
    def initialize(cls, embeddings: EmbeddingTable, seed: int = 0, scale: float = 0.01,
                   n_labels: int = NUM_LABELS) -> RntnParams:
        """Gaussian ``N(0, scale^2)`` weights; the embedding table is used as given."""
        d = embeddings.dim
        rng = np.random.default_rng(seed)
        V = scale * rng.standard_normal((2 * d, 2 * d, d))
        W = scale * rng.standard_normal((d, 2 * d))
        C = scale * rng.standard_normal((n_labels, d))
        return cls(V, W, C, embeddings)

    def arrays(self) -> dict[str, np.ndarray]:
        out = {"V": self.V, "W": self.W, "C": self.C}
        if self.embeddings.trainable:
            out["L"] = self.embeddings.matrix
        return out

    def copy(self) -> RntnParams:
        emb = self.embeddings
        table = EmbeddingTable(emb.vocab, emb.matrix.copy(), emb.trainable, emb.weighting,
                               list(emb.missing))
        return RntnParams(self.V.copy(), self.W.copy(), self.C.copy(), table)


@dataclass
class NodeState:
    vector: np.ndarray
    label_probs: np.ndarray
    span: tuple[int, int]


@dataclass
class Gradients:
    V: np.ndarray
    W: np.ndarray
    C: np.ndarray
    L: np.ndarray | None

    def arrays(self) -> dict[str, np.ndarray]:
        out = {"V": self.V, "W": self.W, "C": self.C}
        if self.L is not None:
            out["L"] = self.L
        return out

    def scale(self, factor: float) -> Gradients:
        return Gradients(self.V * factor, self.W * factor, self.C * factor,
                         None if self.L is None else self.L * factor)


def compose(vi: np.ndarray, vj: np.ndarray, params: RntnParams) -> np.ndarray:
    x = np.concatenate([vi, vj])
    z = np.einsum("i,ijk,j->k", x, params.V, x) + params.W @ x
    return activation(z)


def classify(p: np.ndarray, params: RntnParams) -> np.ndarray:
    return softmax(params.C @ p)


# ---------------------------------------------------------------------------
# batched forward / backward along gold structure


class _Flat:
    """Nodes of several trees flattened in postorder, grouped by height."""

    def __init__(self, trees: Sequence[ParseTree], params: RntnParams,
                 tags: Sequence[Sequence[str]] | None = None):
        left, right, gold, leaf_nodes, spans = [], [], [], [], []
        height: list[int] = []
        words_per_tree = []
        for t, tree in enumerate(trees):
            stack: list[int] = []
            for node in tree.postorder():
                i = len(gold)
                gold.append(label_index(node.label))
                spans.append(node.span)
                if node.is_leaf:
                    left.append(-1)
                    right.append(-1)
                    height.append(0)
                    leaf_nodes.append(i)
                else:
                    r = stack.pop()
                    l = stack.pop()
                    left.append(l)
                    right.append(r)
                    height.append(1 + max(height[l], height[r]))
                stack.append(i)
            words_per_tree.append(tree.words())
        self.n = len(gold)
        self.left = np.array(left, dtype=np.intp)
        self.right = np.array(right, dtype=np.intp)
        self.gold = np.array(gold, dtype=np.intp)
        self.spans = spans
        self.leaf_nodes = np.array(leaf_nodes, dtype=np.intp)
        rows = [params.embeddings.rows(w, None if tags is None else tags[k])
                for k, w in enumerate(words_per_tree)]
        self.rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.intp)
        height_arr = np.array(height)
        top = int(height_arr.max()) if self.n else 0
        self.levels = [np.flatnonzero(height_arr == h) for h in range(1, top + 1)]


def _forward(flat: _Flat, params: RntnParams):
    d = params.d
    Vf = params.V.reshape(4 * d * d, d)
    H = np.zeros((flat.n, d))
    H[flat.leaf_nodes] = params.L[flat.rows]
    for idx in flat.levels:
        X = np.concatenate([H[flat.left[idx]], H[flat.right[idx]]], axis=1)
        XX = (X[:, :, None] * X[:, None, :]).reshape(len(idx), -1)
        H[idx] = activation(XX @ Vf + X @ params.W.T)
    logits = H @ params.C.T
    logp = log_softmax(logits)
    loss = -float(np.sum(logp[np.arange(flat.n), flat.gold]))
    return H, np.exp(logp), loss


def _backward(flat: _Flat, H: np.ndarray, probs: np.ndarray, params: RntnParams) -> Gradients:
    d = params.d
    Vf = params.V.reshape(4 * d * d, d)
    dlogits = probs.copy()
    dlogits[np.arange(flat.n), flat.gold] -= 1.0
    dC = dlogits.T @ H
    # error at each node: its own classification error, plus whatever
    # its parent sends down (added below, parents first)
    dH = dlogits @ params.C
    dW = np.zeros_like(params.W)
    dVf = np.zeros_like(Vf)
    for idx in reversed(flat.levels):
        X = np.concatenate([H[flat.left[idx]], H[flat.right[idx]]], axis=1)
        XX = (X[:, :, None] * X[:, None, :]).reshape(len(idx), -1)
        dZ = dH[idx] * activation_grad(H[idx])
        dW += dZ.T @ X
        dVf += XX.T @ dZ
        M = (dZ @ Vf.T).reshape(len(idx), 2 * d, 2 * d)
        dX = dZ @ params.W + np.einsum("nij,nj->ni", M, X) + np.einsum("nji,nj->ni", M, X)
        dH[flat.left[idx]] += dX[:, :d]
        dH[flat.right[idx]] += dX[:, d:]
    dL = None
    if params.embeddings.trainable:
        dL = np.zeros_like(params.L)
        np.add.at(dL, flat.rows, dH[flat.leaf_nodes])
    return Gradients(dVf.reshape(params.V.shape), dW, dC, dL)


def forward_gold(tree: ParseTree, params: RntnParams,
                 tags: Sequence[str] | None = None) -> tuple[list[NodeState], float]:
    """Node states in postorder along the gold structure, and the summed cross-entropy."""
    flat = _Flat([tree], params, None if tags is None else [tags])
    H, probs, loss = _forward(flat, params)
    states = [NodeState(H[i], probs[i], flat.spans[i]) for i in range(flat.n)]
    return states, loss


def backward(tree: ParseTree, states: Sequence[NodeState], params: RntnParams,
             tags: Sequence[str] | None = None) -> Gradients:
    flat = _Flat([tree], params, None if tags is None else [tags])
    H = np.array([s.vector for s in states])
    probs = np.array([s.label_probs for s in states])
    return _backward(flat, H, probs, params)


def loss_and_grad(trees: Sequence[ParseTree], params: RntnParams,
                  tags: Sequence[Sequence[str]] | None = None):
    """Summed loss and gradients over ``trees``; also returns (correct, total) node counts."""
    flat = _Flat(trees, params, tags)
    H, probs, loss = _forward(flat, params)
    grads = _backward(flat, H, probs, params)
    correct = int(np.sum(np.argmax(probs, axis=1) == flat.gold))
    return loss, grads, correct, flat.n


def gold_accuracy(trees: Sequence[ParseTree], params: RntnParams,
                  tags: Sequence[Sequence[str]] | None = None) -> tuple[float, float]:
    """(summed loss, node accuracy) with labels predicted on the gold structure."""
    if not trees:
        return 0.0, 0.0
    flat = _Flat(trees, params, tags)
    _, probs, loss = _forward(flat, params)
    correct = int(np.sum(np.argmax(probs, axis=1) == flat.gold))
    return loss, correct / flat.n


# ---------------------------------------------------------------------------
# inference


def _pair_score(probs: np.ndarray, scoring: str) -> float:
    if scoring == "max_prob":
        return float(np.max(probs))
    if scoring == "phrase_mass":
        return float(np.sum(probs[_INTERNAL_MASK]))
    raise ValueError(f"unknown scoring {scoring!r}")


def greedy_parse(tokens: Sequence[Token | str], params: RntnParams,
                 tags: Sequence[str] | None = None, scoring: str = "max_prob") -> ParseTree:
    """Merge the best-scoring adjacent pair until one node is left.

    ``scoring="max_prob"`` ranks a pair by its most probable label;
    ``"phrase_mass"`` by the total probability of non-token labels. Ties go
    to the leftmost pair.
    """
    words = [getattr(t, "text", t) for t in tokens]
    if not words:
        raise EmptyInput("greedy_parse needs at least one token")
    rows = params.embeddings.rows(words, tags)
    vecs = params.L[rows]
    leaf_probs = softmax(vecs @ params.C.T)
    nodes: list[tuple[np.ndarray, ParseTree]] = []
    for i, w in enumerate(words):
        label = LABELS[int(np.argmax(leaf_probs[i]))]
        nodes.append((vecs[i], ParseTree(label, (), Token(w, i))))

    def candidate(i):
        p = compose(nodes[i][0], nodes[i + 1][0], params)
        probs = classify(p, params)
        return _pair_score(probs, scoring), p, probs

    cands = [candidate(i) for i in range(len(nodes) - 1)]
    while cands:
        best = max(range(len(cands)), key=lambda i: (cands[i][0], -i))
        _, p, probs = cands[best]
        label = LABELS[int(np.argmax(probs))]
        merged = ParseTree(label, (nodes[best][1], nodes[best + 1][1]))
        nodes[best:best + 2] = [(p, merged)]
        del cands[best]
        if best < len(cands):
            cands[best] = candidate(best)
        if best > 0:
            cands[best - 1] = candidate(best - 1)
    return nodes[0][1]


# ---------------------------------------------------------------------------
# optimisation


class AdagradState:
    def __init__(self, params: RntnParams):
        self.acc = {name: np.zeros_like(arr) for name, arr in params.arrays().items()}


def adagrad_step(params: RntnParams, grads: Gradients, state: AdagradState,
                 lr: float, eps: float = 1e-8) -> RntnParams:
    """In-place AdaGrad: ``acc += g^2; theta -= lr * g / (sqrt(acc) + eps)``."""
    targets = params.arrays()
    for name, g in grads.arrays().items():
        if name not in targets:
            continue
        acc = state.acc[name]
        acc += g * g
        targets[name] -= lr * g / (np.sqrt(acc) + eps)
    return params
