"""Binary parse trees and the bracketed treebank format.

A treebank line looks like ``(1 (13 ...) (3 .))``: every node is
``(label_id left right)`` or, for leaves, ``(label_id token)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .labels import LEAF_LABELS, TOKEN_LABELS, Label, UnknownLabelId

__all__ = [
    "Token", "ParseTree", "SchemaViolation", "BracketError", "UnbalancedParens",
    "NonBinaryNode", "EmptyLeaf", "UnknownLabelId", "parse_bracketed",
    "serialize_bracketed", "validate_schema", "ngram_length", "read_treebank",
    "write_treebank", "tokenize", "token_label",
]

_ESCAPES = {"(": "-LRB-", ")": "-RRB-"}
_UNESCAPES = {v: k for k, v in _ESCAPES.items()}

PUNCT_TOKENS = frozenset({",", ".", ";", "!", "?"})
SEPARATOR_TOKENS = frozenset({",", ":", ";"})
_TRAILING = ",.:;!?"


@dataclass(frozen=True)
class Token:
    text: str
    index: int

    def __post_init__(self):
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"invalid token text: {self.text!r}")


@dataclass(frozen=True)
class ParseTree:
    """A fully labeled, strictly binary tree.

    Leaves carry a :class:`Token` and no children; internal nodes carry
    exactly two children and no token.
    """

    label: Label
    children: tuple[ParseTree, ...] = ()
    token: Token | None = field(default=None)

    def __post_init__(self):
        if self.token is None:
            if len(self.children) != 2:
                raise ValueError(
                    f"internal node needs exactly 2 children, got {len(self.children)}")
        elif self.children:
            raise ValueError("a leaf cannot have children")

    @classmethod
    def leaf(cls, label: Label, text: str, index: int) -> ParseTree:
        return cls(label, (), Token(text, index))

    @classmethod
    def node(cls, label: Label, left: ParseTree, right: ParseTree) -> ParseTree:
        return cls(label, (left, right))

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    @property
    def left(self) -> ParseTree:
        return self.children[0]

    @property
    def right(self) -> ParseTree:
        return self.children[1]

    @cached_property
    def n_leaves(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.n_leaves + self.right.n_leaves

    @property
    def n_nodes(self) -> int:
        return 2 * self.n_leaves - 1

    @cached_property
    def start(self) -> int:
        node = self
        while not node.is_leaf:
            node = node.left
        return node.token.index

    @property
    def end(self) -> int:
        """Exclusive end index of the token span."""
        return self.start + self.n_leaves

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end

    def leaves(self) -> list[ParseTree]:
        return [n for n in self.postorder() if n.is_leaf]

    def tokens(self) -> list[Token]:
        return [n.token for n in self.leaves()]

    def words(self) -> list[str]:
        return [n.token.text for n in self.leaves()]

    def postorder(self) -> Iterator[ParseTree]:
        """Children before parents, left before right."""
        stack: list[tuple[ParseTree, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if node.is_leaf or expanded:
                yield node
            else:
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))

    def nodes(self) -> list[ParseTree]:
        return list(self.postorder())

    def labeled_spans(self) -> list[tuple[int, int, Label]]:
        return [(n.start, n.end, n.label) for n in self.postorder()]

    def relabel(self, labels: Iterable[Label]) -> ParseTree:
        """Copy of this tree with node labels replaced in postorder."""
        it = iter(labels)
        built: list[ParseTree] = []
        for node in self.postorder():
            label = next(it)
            if node.is_leaf:
                built.append(ParseTree(label, (), node.token))
            else:
                right = built.pop()
                left = built.pop()
                built.append(ParseTree(label, (left, right)))
        return built[0]

    def __str__(self) -> str:
        return serialize_bracketed(self)


@dataclass(frozen=True)
class SchemaViolation:
    kind: str
    span: tuple[int, int]
    label: Label

    def __str__(self) -> str:
        return f"{self.kind} at {self.span} ({self.label.display})"


class BracketError(ValueError):
    pass


class UnbalancedParens(BracketError):
    pass


class NonBinaryNode(BracketError):
    def __init__(self, position: int, n_children: int):
        super().__init__(f"node at offset {position} has {n_children} children, expected 2")
        self.position = position


class EmptyLeaf(BracketError):
    def __init__(self, position: int):
        super().__init__(f"node at offset {position} has neither token nor children")
        self.position = position


_LEX = re.compile(r"\(|\)|[^\s()]+")


def _escape(text: str) -> str:
    for raw, esc in _ESCAPES.items():
        text = text.replace(raw, esc)
    return text


def _unescape(text: str) -> str:
    for esc, raw in _UNESCAPES.items():
        text = text.replace(esc, raw)
    return text


def parse_bracketed(text: str) -> ParseTree:
    """Parse a single ``(id child child)`` / ``(id token)`` expression."""
    # Each frame: [offset, label, children, tokens]
    stack: list[list] = []
    result: ParseTree | None = None
    n_tokens = 0
    expect_label = False
    for match in _LEX.finditer(text):
        tok = match.group()
        pos = match.start()
        if result is not None:
            raise BracketError(f"trailing content at offset {pos}")
        if tok == "(":
            if expect_label:
                raise BracketError(f"missing label id at offset {pos}")
            stack.append([pos, None, [], []])
            expect_label = True
        elif tok == ")":
            if not stack:
                raise UnbalancedParens(f"unexpected ')' at offset {pos}")
            if expect_label:
                raise EmptyLeaf(pos)
            start, label, children, words = stack.pop()
            if words and children or len(words) > 1:
                raise NonBinaryNode(start, len(children) + len(words))
            if words:
                node = ParseTree(label, (), Token(words[0], n_tokens))
                n_tokens += 1
            elif not children:
                raise EmptyLeaf(start)
            elif len(children) != 2:
                raise NonBinaryNode(start, len(children))
            else:
                node = ParseTree(label, tuple(children))
            if stack:
                stack[-1][2].append(node)
            else:
                result = node
        else:
            if not stack:
                raise BracketError(f"token outside brackets at offset {pos}")
            frame = stack[-1]
            if expect_label:
                try:
                    label_id = int(tok)
                except ValueError:
                    raise UnknownLabelId(tok) from None
                frame[1] = Label.from_id(label_id)
                expect_label = False
            else:
                if frame[2]:
                    raise NonBinaryNode(frame[0], len(frame[2]) + 1)
                frame[3].append(_unescape(tok))
    if stack:
        raise UnbalancedParens(f"{len(stack)} unclosed '(' at end of input")
    if result is None:
        raise BracketError("empty input")
    return result


def serialize_bracketed(tree: ParseTree) -> str:
    parts: list[str] = []
    stack: list[ParseTree | str] = [tree]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif item.is_leaf:
            parts.append(f"({item.label.id} {_escape(item.token.text)})")
        else:
            parts.append(f"({item.label.id} ")
            stack.append(")")
            stack.append(item.right)
            stack.append(" ")
            stack.append(item.left)
    return "".join(parts)


def validate_schema(tree: ParseTree) -> list[SchemaViolation]:
    violations = []
    if tree.label is not Label.ROOT_SENTENCE:
        violations.append(SchemaViolation("RootNotRootSentence", tree.span, tree.label))
    for node in tree.postorder():
        if node.is_leaf and node.label not in LEAF_LABELS:
            violations.append(SchemaViolation("LeafWithInternalLabel", node.span, node.label))
        if not node.is_leaf and node.label in TOKEN_LABELS:
            violations.append(SchemaViolation("InternalWithTokenLabel", node.span, node.label))
        if node is not tree and node.label is Label.ROOT_SENTENCE:
            violations.append(SchemaViolation("RootSentenceNotAtRoot", node.span, node.label))
    return violations


def ngram_length(node: ParseTree) -> int:
    return node.n_leaves


def read_treebank(path) -> list[ParseTree]:
    """Read one tree per non-empty line. Errors cite the 1-based line number."""
    trees = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                trees.append(parse_bracketed(line))
            except ValueError as exc:
                raise BracketError(f"{path}:{lineno}: {exc}") from exc
    return trees


def write_treebank(trees: Iterable[ParseTree], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tree in trees:
            fh.write(serialize_bracketed(tree) + "\n")


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Whitespace tokenization with trailing punctuation split off.

    Returns ``(token, start, end)`` triples with character offsets into *text*.
    """
    out = []
    for match in re.finditer(r"\S+", text):
        word, start = match.group(), match.start()
        tail = []
        while len(word) > 1 and word[-1] in _TRAILING:
            tail.append(word[-1])
            word = word[:-1]
        out.append((word, start, start + len(word)))
        pos = start + len(word)
        for ch in reversed(tail):
            out.append((ch, pos, pos + 1))
            pos += 1
    return out


def token_label(text: str) -> Label:
    """Label the exporter gives to a token not claimed by a single-token span."""
    if text in PUNCT_TOKENS:
        return Label.PUNCT
    if not any(ch.isalnum() for ch in text):
        return Label.SYMBOL
    return Label.WORD
