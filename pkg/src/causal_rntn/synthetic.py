"""Small synthetic causal requirements, annotated in brat standoff form.

Used for smoke tests and demos; trees are produced through the regular
exporter so they exercise the whole pipeline.
"""

from __future__ import annotations

import numpy as np

from .brat import Branching, SpanAnnotation, StandoffDoc, export_tree
from .labels import Label
from .treebank import ParseTree, Token, tokenize

VARIABLES = ["A", "B", "C", "the user", "the system", "the sensor", "the valve", "the door"]
CONDITIONS = ["is true", "is false", "is active", "is pressed", "is open", "is closed",
              "fails", "is locked"]
EFFECTS = ["shall occur", "shall stop", "shall start", "shall open", "shall beep",
           "shall be reset", "shall close"]


class _Builder:
    def __init__(self):
        self.words: list[str] = []
        self.spans: list[tuple[Label, int, int]] = []

    def add(self, text: str) -> tuple[int, int]:
        start = len(self.words)
        self.words.extend(text.split())
        return start, len(self.words)

    def mark(self, label: Label, start: int, end: int) -> None:
        self.spans.append((label, start, end))

    def statement(self, var: str, cond: str) -> tuple[int, int]:
        vs, ve = self.add(var)
        cs, ce = self.add(cond)
        self.mark(Label.VARIABLE, vs, ve)
        self.mark(Label.CONDITION, cs, ce)
        self.mark(Label.STATEMENT, vs, ce)
        return vs, ce

    def doc(self, name: str) -> StandoffDoc:
        text = " ".join(self.words)
        # glue punctuation to the preceding word, as in ordinary prose
        text = text.replace(" ,", ",").replace(" .", ".")
        triples = tokenize(text)
        if [t for t, _, _ in triples] != self.words:
            raise AssertionError("synthetic tokenization drifted")
        tokens = [Token(t, i) for i, (t, _, _) in enumerate(triples)]
        offsets = [(s, e) for _, s, e in triples]
        spans = []
        for k, (label, i, j) in enumerate(self.spans, 1):
            s, e = offsets[i][0], offsets[j - 1][1]
            spans.append(SpanAnnotation(f"T{k}", label, s, e, text[s:e]))
        return StandoffDoc(text, tokens, offsets, spans, name)


def synthetic_doc(rng: np.random.Generator, name: str = "") -> StandoffDoc:
    b = _Builder()
    pick = lambda xs: xs[int(rng.integers(len(xs)))]  # noqa: E731
    cue = pick(["If", "When"])
    conj = rng.random() < 0.4
    b.add(cue)
    b.mark(Label.KEY_C, 0, 1)
    s1 = b.statement(pick(VARIABLES), pick(CONDITIONS))
    cause_end = s1[1]
    if conj:
        b.add("and")
        s2 = b.statement(pick(VARIABLES), pick(CONDITIONS))
        b.mark(Label.AND, s1[0], s2[1])
        cause_end = s2[1]
    b.mark(Label.CAUSE, 0, cause_end)
    b.add(",")
    if rng.random() < 0.5:
        ks, _ = b.add("then")
        b.mark(Label.KEY_C, ks, ks + 1)
        st = b.statement(pick(VARIABLES), pick(EFFECTS))
        b.mark(Label.EFFECT, ks, st[1])
        end = st[1]
    else:
        end = b.statement(pick(VARIABLES), pick(EFFECTS))[1]
    b.mark(Label.CAUSE_EFFECT_RELATION, 0, end)
    b.add(".")
    return b.doc(name)


def synthetic_docs(n: int, seed: int = 0) -> list[StandoffDoc]:
    rng = np.random.default_rng(seed)
    return [synthetic_doc(rng, f"syn{i:04d}") for i in range(n)]


def synthetic_treebank(n: int, seed: int = 0,
                       branching: Branching = Branching.LEFT) -> list[ParseTree]:
    return [export_tree(doc, branching) for doc in synthetic_docs(n, seed)]
