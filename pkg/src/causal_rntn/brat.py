"""brat standoff ingestion and export to binary treebank trees.

Manual annotations in brat may span any number of tokens. The exporter
rebuilds a strictly binary tree from them:

* every token gets a leaf; a token covered by a single-token annotation takes
  that annotation's label, all others become Word/Punct/Symbol;
* a RootSentence over the whole sentence and a Sentence over everything but
  the final punctuation are added unless already annotated;
* annotations with more than two children are binarized, either by merging
  separators (``,`` ``:`` ``;``) into the segment on their left, or by
  cascading copies of the annotation's own label to the left or right.
"""

from __future__ import annotations

import enum
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .labels import (AUTOMATIC_LABELS, LEAF_LABELS, SEPARATED, Label,
                     UnknownLabelName)
from .treebank import SEPARATOR_TOKENS, ParseTree, Token, token_label, tokenize

log = logging.getLogger(__name__)


class Branching(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


class StandoffError(ValueError):
    pass


class MalformedLine(StandoffError):
    def __init__(self, lineno: int, line: str, reason: str = ""):
        msg = f"line {lineno}: malformed annotation {line!r}"
        super().__init__(f"{msg} ({reason})" if reason else msg)
        self.lineno = lineno


class SurfaceMismatch(StandoffError):
    def __init__(self, span_id: str, expected: str, found: str):
        super().__init__(f"{span_id}: surface {expected!r} does not match text {found!r}")
        self.span_id = span_id


class PartialOverlap(StandoffError):
    def __init__(self, first: str, second: str):
        super().__init__(f"spans {first} and {second} overlap without nesting")
        self.ids = (first, second)


class AutomaticLabelInInput(StandoffError):
    def __init__(self, span_id: str, label: Label):
        super().__init__(f"{span_id}: {label.display} is assigned automatically "
                         "and must not be annotated")
        self.span_id = span_id


class MisalignedSpan(StandoffError):
    def __init__(self, span_id: str):
        super().__init__(f"{span_id}: span boundaries do not fall on token boundaries")
        self.span_id = span_id


class ExportError(ValueError):
    pass


class UncoveredToken(ExportError):
    def __init__(self, index: int):
        super().__init__(f"token {index} is not covered by the sentence annotation")
        self.index = index


class NoFinalPunct(ExportError):
    pass


class UnaryChain(ExportError):
    """Two annotations cover exactly the same tokens; a binary tree can hold only one."""


class InvalidLeafLabel(ExportError):
    pass


class CorpusExportError(ExportError):
    def __init__(self, failures: list[tuple[str, Exception]]):
        lines = [f"{name}: {exc}" for name, exc in failures]
        super().__init__(f"{len(failures)} document(s) failed to export:\n" + "\n".join(lines))
        self.failures = failures


@dataclass(frozen=True)
class SpanAnnotation:
    id: str
    label: Label
    start: int
    end: int
    surface: str


@dataclass
class StandoffDoc:
    sentence_text: str
    tokens: list[Token]
    offsets: list[tuple[int, int]]
    spans: list[SpanAnnotation] = field(default_factory=list)
    name: str = ""

    def token_range(self, span: SpanAnnotation) -> tuple[int, int]:
        """Half-open token index range covered by *span*."""
        starts = {s: i for i, (s, _) in enumerate(self.offsets)}
        ends = {e: i for i, (_, e) in enumerate(self.offsets)}
        if span.start not in starts or span.end not in ends:
            raise MisalignedSpan(span.id)
        return starts[span.start], ends[span.end] + 1


_ENTITY = re.compile(r"^(T\d+)\t(\S+) (\d+) (\d+)\t(.*)$")


def parse_standoff(ann_text: str, sentence_text: str, name: str = "") -> StandoffDoc:
    triples = tokenize(sentence_text)
    tokens = [Token(text, i) for i, (text, _, _) in enumerate(triples)]
    offsets = [(s, e) for _, s, e in triples]
    doc = StandoffDoc(sentence_text, tokens, offsets, [], name)

    for lineno, line in enumerate(ann_text.splitlines(), 1):
        if not line.strip() or not line.startswith("T"):
            continue  # relations, events, attributes, notes
        m = _ENTITY.match(line)
        if m is None:
            raise MalformedLine(lineno, line)
        span_id, label_name, start, end, surface = m.groups()
        try:
            label = Label.from_name(label_name)
        except UnknownLabelName:
            raise MalformedLine(lineno, line, f"unknown label {label_name!r}") from None
        start, end = int(start), int(end)
        if start >= end:
            raise MalformedLine(lineno, line, "empty span")
        if label in AUTOMATIC_LABELS:
            raise AutomaticLabelInInput(span_id, label)
        found = sentence_text[start:end]
        if found != surface:
            raise SurfaceMismatch(span_id, surface, found)
        span = SpanAnnotation(span_id, label, start, end, surface)
        doc.token_range(span)
        doc.spans.append(span)

    _check_nesting(doc.spans)
    return doc


def _check_nesting(spans: Sequence[SpanAnnotation]) -> None:
    ordered = sorted(spans, key=lambda s: (s.start, -s.end))
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if b.start >= a.end:
                break
            if b.end > a.end:
                raise PartialOverlap(a.id, b.id)


def read_standoff_pair(txt_path, ann_path=None) -> StandoffDoc:
    txt_path = Path(txt_path)
    ann_path = Path(ann_path) if ann_path else txt_path.with_suffix(".ann")
    text = txt_path.read_text(encoding="utf-8")
    ann = ann_path.read_text(encoding="utf-8")
    return parse_standoff(ann, text, name=txt_path.stem)


def read_standoff_dir(directory) -> list[StandoffDoc]:
    """Load every ``<name>.txt`` / ``<name>.ann`` pair, sorted by name."""
    directory = Path(directory)
    docs = []
    for txt in sorted(directory.glob("*.txt")):
        ann = txt.with_suffix(".ann")
        if ann.exists():
            docs.append(read_standoff_pair(txt, ann))
    return docs


# ---------------------------------------------------------------------------
# export


@dataclass
class _Seg:
    label: Label
    start: int
    end: int
    ids: tuple[str, ...]


def export_tree(doc: StandoffDoc, branching: Branching = Branching.LEFT) -> ParseTree:
    if branching is Branching.BOTH:
        raise ValueError("export_tree takes LEFT or RIGHT; use export_corpus for BOTH")
    n = len(doc.tokens)
    if n == 0:
        raise ExportError("empty sentence")
    if token_label(doc.tokens[-1].text) is not Label.PUNCT:
        raise NoFinalPunct(f"sentence does not end with punctuation: {doc.tokens[-1].text!r}")

    segs = [_Seg(s.label, *doc.token_range(s), (s.id,)) for s in doc.spans]
    by_extent: dict[tuple[int, int], _Seg] = {}
    for seg in segs:
        other = by_extent.get((seg.start, seg.end))
        if other is not None:
            raise UnaryChain(f"{other.ids[0]} and {seg.ids[0]} cover the same tokens")
        by_extent[(seg.start, seg.end)] = seg

    root = next((s for s in segs if s.label is Label.ROOT_SENTENCE), None)
    if root is None:
        if (0, n) in by_extent:
            raise ExportError(f"{by_extent[(0, n)].ids[0]} spans the whole sentence "
                              "but is not a RootSentence")
        root = _Seg(Label.ROOT_SENTENCE, 0, n, ("<root>",))
        segs.append(root)
        by_extent[(0, n)] = root
    elif (root.start, root.end) != (0, n):
        raise UncoveredToken(0 if root.start > 0 else root.end)

    # Everything before the final punctuation forms one segment.
    if n > 2 and (0, n - 1) not in by_extent:
        body = _Seg(Label.SENTENCE, 0, n - 1, ("<sentence>",))
        for seg in segs:
            if seg.start < n - 1 < seg.end and seg.start > 0:
                raise ExportError(f"{seg.ids[0]} crosses the final punctuation")
        segs.append(body)
        by_extent[(0, n - 1)] = body

    for seg in segs:
        if seg.end - seg.start == 1 and seg.label not in LEAF_LABELS:
            raise InvalidLeafLabel(f"{seg.ids[0]}: {seg.label.display} cannot label a single token")

    return _build(root, segs, doc.tokens, branching)


def _build(root: _Seg, segs: list[_Seg], tokens: list[Token], branching: Branching) -> ParseTree:
    ordered = sorted(segs, key=lambda s: (s.start, -s.end))
    single = {s.start: s.label for s in ordered if s.end - s.start == 1}
    multi = [s for s in ordered if s.end - s.start > 1]

    def leaf(i: int) -> ParseTree:
        tok = tokens[i]
        return ParseTree(single.get(i, token_label(tok.text)), (), tok)

    def build(seg: _Seg, pos: int) -> tuple[ParseTree, int]:
        # multi[pos:] are candidate descendants of seg, in document order
        children: list[ParseTree] = []
        i = seg.start
        while i < seg.end:
            if pos < len(multi) and multi[pos].start == i and multi[pos].end <= seg.end:
                child, pos = build(multi[pos], pos + 1)
                children.append(child)
                i = child.end
            else:
                children.append(leaf(i))
                i += 1
        return _binarize(children, seg.label, branching), pos

    start = multi.index(root) + 1
    tree, _ = build(root, start)
    return tree


def _is_separator(node: ParseTree) -> bool:
    return node.is_leaf and node.token.text in SEPARATOR_TOKENS


def _binarize(children: list[ParseTree], label: Label, branching: Branching) -> ParseTree:
    if len(children) == 2:
        return ParseTree(label, tuple(children))
    if len(children) < 2:
        raise UnaryChain(f"{label.display} segment has a single child")
    if any(_is_separator(c) for c in children):
        return _separator_merge(children, label, branching)
    return _cascade(children, label, branching)


def _cascade(items: list[ParseTree], label: Label, branching: Branching) -> ParseTree:
    if len(items) == 1:
        return items[0]
    if branching is Branching.LEFT:
        acc = items[0]
        for item in items[1:]:
            acc = ParseTree(label, (acc, item))
    else:
        acc = items[-1]
        for item in reversed(items[:-1]):
            acc = ParseTree(label, (item, acc))
    return acc


def _separator_merge(children: list[ParseTree], label: Label, branching: Branching) -> ParseTree:
    """Attach each separator to the material on its left.

    A single annotated segment merged with its separator becomes the
    ``Separated...`` variant of its label when one exists; anything else (and
    everything directly under a Sentence) keeps the parent label. The merged
    groups are then nested to the right.
    """
    groups: list[ParseTree] = []
    pending: list[ParseTree] = []
    for child in children:
        if not _is_separator(child):
            pending.append(child)
            continue
        if not pending:
            groups.append(child)
            continue
        body = _cascade(pending, label, branching)
        if len(pending) == 1 and label is not Label.SENTENCE:
            merged_label = SEPARATED.get(body.label, label)
        else:
            merged_label = label
        groups.append(ParseTree(merged_label, (body, child)))
        pending = []
    if pending:
        groups.append(_cascade(pending, label, branching))

    if len(groups) == 1:
        only = groups[0]
        return ParseTree(label, only.children)
    acc = groups[-1]
    for group in reversed(groups[:-1]):
        acc = ParseTree(label, (group, acc))
    return acc


def export_corpus(docs: Iterable[StandoffDoc], branching: Branching = Branching.LEFT) -> list[ParseTree]:
    """Export all docs; ``BOTH`` yields every left tree followed by every right tree."""
    docs = list(docs)
    modes = [Branching.LEFT, Branching.RIGHT] if branching is Branching.BOTH else [branching]
    failures: list[tuple[str, Exception]] = []
    out: list[ParseTree] = []
    for mode in modes:
        for k, doc in enumerate(docs):
            try:
                out.append(export_tree(doc, mode))
            except (ExportError, StandoffError) as exc:
                if mode is modes[0]:
                    failures.append((doc.name or f"doc[{k}]", exc))
    if failures:
        raise CorpusExportError(failures)
    return out


def write_standoff(doc: StandoffDoc, directory, name: str | None = None) -> tuple[Path, Path]:
    """Write ``doc`` as a ``.txt``/``.ann`` pair; inverse of :func:`read_standoff_pair`."""
    name = name or doc.name
    directory = Path(directory)
    os.makedirs(directory, exist_ok=True)
    txt = directory / f"{name}.txt"
    ann = directory / f"{name}.ann"
    txt.write_text(doc.sentence_text, encoding="utf-8")
    lines = [f"{s.id}\t{s.label.display} {s.start} {s.end}\t{s.surface}" for s in doc.spans]
    ann.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return txt, ann
