"""Hypothesis strategies for random binary trees."""

import string

from hypothesis import strategies as st

from causal_rntn.labels import Label
from causal_rntn.treebank import ParseTree, Token

words = st.text(alphabet=string.ascii_letters + string.digits + ".,:;()=-'", min_size=1,
                max_size=6).filter(lambda w: "-LRB-" not in w and "-RRB-" not in w)
labels = st.sampled_from(list(Label))


@st.composite
def trees(draw, min_leaves=1, max_leaves=12, words=words, labels=labels):
    n = draw(st.integers(min_leaves, max_leaves))
    toks = draw(st.lists(words, min_size=n, max_size=n))

    def build(i, j):
        if j - i == 1:
            return ParseTree(draw(labels), (), Token(toks[i], i))
        k = draw(st.integers(i + 1, j - 1))
        return ParseTree(draw(labels), (build(i, k), build(k, j)))

    return build(0, n)
