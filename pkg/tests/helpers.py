"""Shared oracles and random instances for model tests."""

import numpy as np

from causal_rntn.embeddings import EmbeddingTable, Vocab
from causal_rntn.labels import Label
from causal_rntn.rntn import RntnParams, loss_and_grad
from causal_rntn.treebank import ParseTree, Token

ALL_LABELS = list(Label)


def random_tree(rng, n_tokens, words=None):
    words = words or [f"w{int(rng.integers(4))}" for _ in range(n_tokens)]

    def build(i, j):
        label = ALL_LABELS[int(rng.integers(len(ALL_LABELS)))]
        if j - i == 1:
            return ParseTree(label, (), Token(words[i], i))
        k = int(rng.integers(i + 1, j))
        return ParseTree(label, (build(i, k), build(k, j)))

    return build(0, n_tokens)


def random_params(rng, d, scale=0.5, vocab_size=4, zero_v=False):
    vocab = Vocab([f"w{i}" for i in range(vocab_size)])
    L = rng.uniform(-1, 1, size=(len(vocab), d))
    V = np.zeros((2 * d, 2 * d, d)) if zero_v else rng.normal(0, scale, (2 * d, 2 * d, d))
    W = rng.normal(0, scale, (d, 2 * d))
    C = rng.normal(0, scale, (len(ALL_LABELS), d))
    return RntnParams(V, W, C, EmbeddingTable(vocab, L, trainable=True))


def oracle_losses(tree, V, W, C, L, vocab):
    """Summed cross-entropy of the tensor network, for a batch of parameter sets.

    Each of ``V, W, C, L`` carries a leading batch axis (size 1 broadcasts).
    Independent of the package's model code.
    """
    total = 0.0

    def visit(node):
        nonlocal total
        if node.is_leaf:
            h = L[:, vocab.index(node.token.text)]
        else:
            x = np.concatenate(np.broadcast_arrays(visit(node.left), visit(node.right)), axis=-1)
            h = np.tanh(np.einsum("...i,...ijk,...j->...k", x, V, x)
                        + np.einsum("...ki,...i->...k", W, x))
        logits = np.einsum("...ld,...d->...l", C, h)
        m = logits.max(axis=-1, keepdims=True)
        log_z = m[..., 0] + np.log(np.exp(logits - m).sum(axis=-1))
        total = total - (logits[..., node.label.id - 1] - log_z)
        return h

    visit(tree)
    return total


def numeric_gradients(tree, params, eps=1e-5):
    """Central differences for every entry of every trainable block, batched per block."""
    base = {"V": params.V, "W": params.W, "C": params.C, "L": params.L}
    out = {}
    for name in params.arrays():
        arr = base[name]
        m = arr.size
        stacked = np.repeat(arr.reshape(1, m), 2 * m, axis=0)
        stacked[np.arange(m), np.arange(m)] += eps
        stacked[m + np.arange(m), np.arange(m)] -= eps
        args = {k: v[None] for k, v in base.items()}
        args[name] = stacked.reshape((2 * m,) + arr.shape)
        losses = oracle_losses(tree, vocab=params.embeddings.vocab, **args)
        out[name] = ((losses[:m] - losses[m:]) / (2 * eps)).reshape(arr.shape)
    return out


def finite_difference_errors(tree, params, eps=1e-5, floor=1e-4):
    """Worst relative error per block between analytic and numeric gradients.

    Relative error is ``|a - n| / max(|a|, |n|, floor)``; the floor keeps
    entries whose true gradient is zero from dividing rounding noise by zero.
    """
    _, grads, _, _ = loss_and_grad([tree], params)
    analytic = grads.arrays()
    worst = {}
    for name, numeric in numeric_gradients(tree, params, eps).items():
        a = analytic[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(numeric)), floor)
        worst[name] = float(np.max(np.abs(a - numeric) / denom))
    return worst


def vanilla_oracle(tree, params):
    """Plain recursive network ``p = tanh(W [a; b])`` with softmax classifier.

    Written without any of the package's model code. Returns node vectors
    in postorder and the summed cross-entropy.
    """
    vocab = params.embeddings.vocab
    vectors, loss = [], 0.0

    def visit(node):
        nonlocal loss
        if node.is_leaf:
            h = params.L[vocab.index(node.token.text)]
        else:
            a = visit(node.left)
            b = visit(node.right)
            h = np.tanh(params.W @ np.concatenate([a, b]))
        logits = params.C @ h
        m = logits.max()
        log_z = m + np.log(np.exp(logits - m).sum())
        loss -= logits[node.label.id - 1] - log_z
        vectors.append(h)
        return h

    visit(tree)
    return vectors, loss
