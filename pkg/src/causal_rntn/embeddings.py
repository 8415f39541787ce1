"""Word vectors: trainable random tables and frozen POS-enriched tables."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

UNK = "<unk>"

# nltk's universal tagset
TAGSET = ("ADJ", "ADP", "ADV", "CONJ", "DET", "NOUN", "NUM", "PRT", "PRON", "VERB", ".", "X")
_TAG_INDEX = {t: i for i, t in enumerate(TAGSET)}


class Vocab:
    """Bijective word <-> index map with a single UNK entry at index 0."""

    def __init__(self, words: Iterable[str] = ()):
        self.itos: list[str] = [UNK]
        self.stoi: dict[str, int] = {UNK: 0}
        for w in words:
            self.add(w)

    @classmethod
    def from_corpus(cls, sentences: Iterable[Sequence[str]], min_count: int = 1) -> Vocab:
        counts = Counter(w for sent in sentences for w in sent)
        # sort for an order independent of corpus iteration details
        return cls(sorted(w for w, c in counts.items() if c >= min_count))

    def add(self, word: str) -> int:
        if word not in self.stoi:
            self.stoi[word] = len(self.itos)
            self.itos.append(word)
        return self.stoi[word]

    def index(self, word: str, *fallbacks: str) -> int:
        for key in (word, *fallbacks):
            idx = self.stoi.get(key)
            if idx is not None:
                return idx
        return 0

    def __len__(self) -> int:
        return len(self.itos)

    def __contains__(self, word: str) -> bool:
        return word in self.stoi

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self.itos == other.itos


@dataclass(frozen=True)
class PosWeighting:
    pos_dims: int
    pretrained_dims: int

    def __post_init__(self):
        if self.pos_dims < 0 or self.pretrained_dims < 0 or self.dim == 0:
            raise ValueError(f"invalid weighting {self}")

    @property
    def dim(self) -> int:
        return self.pos_dims + self.pretrained_dims


POS50 = PosWeighting(30, 30)
POS75 = PosWeighting(45, 15)
POS100 = PosWeighting(60, 0)
WEIGHTINGS = {"pos50": POS50, "pos75": POS75, "pos100": POS100}


@dataclass
class EmbeddingTable:
    vocab: Vocab
    matrix: np.ndarray
    trainable: bool = True
    weighting: PosWeighting | None = None
    missing: list[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def rows(self, words: Sequence[str], tags: Sequence[str] | None = None) -> np.ndarray:
        """Row indices for a token sequence; unknown words map to UNK."""
        if self.weighting is None:
            return np.array([self.vocab.index(w) for w in words], dtype=np.intp)
        if tags is None:
            tags = tag_pos(words)
        return np.array([self.vocab.index(pos_key(w, t), pos_key(UNK, t))
                         for w, t in zip(words, tags)], dtype=np.intp)


class DimMismatch(ValueError):
    def __init__(self, word: str, expected: int, found: int):
        super().__init__(f"vector for {word!r} has {found} values, expected {expected}")
        self.word = word


class MalformedVector(ValueError):
    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: cannot parse vector {line[:60]!r}")
        self.lineno = lineno


class ShortInput(ValueError):
    pass


def init_random(vocab: Vocab, d: int, r: float = 1e-4, seed: int = 0) -> EmbeddingTable:
    if d <= 0 or r <= 0:
        raise ValueError("d and r must be positive")
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-r, r, size=(len(vocab), d))
    return EmbeddingTable(vocab, matrix, trainable=True)


def read_vectors(path, dims: int, truncate: bool = False) -> dict[str, np.ndarray]:
    """Parse a ``word v1 ... vd`` text file (a fastText ``count dim`` header is skipped).

    With ``truncate`` longer vectors are cut to their first ``dims`` values.
    """
    vectors = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            word, values = parts[0], parts[1:]
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise MalformedVector(lineno, line) from None
            if len(vec) < dims or (len(vec) > dims and not truncate):
                raise DimMismatch(word, dims, len(vec))
            if not np.all(np.isfinite(vec)):
                raise MalformedVector(lineno, line)
            vectors[word] = vec[:dims]
    return vectors


def load_pretrained(path, vocab: Vocab, dims: int, truncate: bool = False) -> EmbeddingTable:
    vectors = read_vectors(path, dims, truncate)
    matrix = np.zeros((len(vocab), dims))
    missing = []
    for i, word in enumerate(vocab.itos):
        vec = vectors.get(word)
        if vec is None:
            if word != UNK:
                missing.append(word)
        else:
            matrix[i] = vec
    return EmbeddingTable(vocab, matrix, trainable=False, missing=missing)


def pos_vector(tag: str, dims: int) -> np.ndarray:
    """One-hot over :data:`TAGSET`, zero-padded or truncated to ``dims``."""
    vec = np.zeros(dims)
    idx = _TAG_INDEX.get(tag, _TAG_INDEX["X"])
    if idx < dims:
        vec[idx] = 1.0
    return vec


def pos_concat(word_vec, pos_vec, weighting: PosWeighting) -> np.ndarray:
    """POS part first, pre-trained part second."""
    word_vec = np.asarray(word_vec, dtype=np.float64)
    pos_vec = np.asarray(pos_vec, dtype=np.float64)
    if len(pos_vec) < weighting.pos_dims:
        raise ShortInput(f"POS vector has {len(pos_vec)} entries, need {weighting.pos_dims}")
    if len(word_vec) < weighting.pretrained_dims:
        raise ShortInput(f"word vector has {len(word_vec)} entries, "
                         f"need {weighting.pretrained_dims}")
    return np.concatenate([pos_vec[:weighting.pos_dims], word_vec[:weighting.pretrained_dims]])


def pos_key(word: str, tag: str) -> str:
    return f"{word}\t{tag}"


def build_pos_table(tagged_sentences: Iterable[Sequence[tuple[str, str]]],
                    pretrained: Mapping[str, np.ndarray] | None,
                    weighting: PosWeighting) -> EmbeddingTable:
    """Frozen table with one row per (word, tag) pair seen in the corpus.

    Every tag also gets an ``<unk>`` row carrying only the POS part, so unseen
    words keep their syntactic information.
    """
    pretrained = pretrained or {}
    pairs = sorted({(w, t) for sent in tagged_sentences for w, t in sent})
    vocab = Vocab([pos_key(UNK, t) for t in TAGSET] + [pos_key(w, t) for w, t in pairs])
    matrix = np.zeros((len(vocab), weighting.dim))
    zeros = np.zeros(weighting.pretrained_dims)
    missing = set()
    for i, key in enumerate(vocab.itos):
        if key == UNK:
            continue
        word, tag = key.split("\t")
        vec = pretrained.get(word) if word != UNK else zeros
        if vec is None:
            if weighting.pretrained_dims:
                missing.add(word)
            vec = zeros
        matrix[i] = pos_concat(vec, pos_vector(tag, weighting.pos_dims), weighting)
    return EmbeddingTable(vocab, matrix, trainable=False, weighting=weighting,
                          missing=sorted(missing))


# ---------------------------------------------------------------------------
# fallback tagger

_LEXICON = {
    "DET": "a an the this that these those each every any some no all both either neither another",
    "PRON": "i you he she it we they me him her us them my your his its our their mine yours "
            "who whom whose which what itself themselves",
    "ADP": "of in on at by for with from to into onto upon about above below under over after "
           "before during through between among against without within via per than until since if",
    "CONJ": "and or but nor yet so",
    "PRT": "not n't 's",
    "VERB": "is are was were be been being am has have had do does did shall should will would "
            "can could may might must",
    "ADV": "then also only always never often very however when where while once else",
    "NUM": "one two three four five six seven eight nine ten hundred thousand zero",
}
_WORD_TAGS = {w: tag for tag, words in _LEXICON.items() for w in words.split()}
_SUFFIXES = (
    ("ly", "ADV"), ("ing", "VERB"), ("ed", "VERB"), ("ize", "VERB"), ("ise", "VERB"),
    ("ous", "ADJ"), ("ful", "ADJ"), ("able", "ADJ"), ("ible", "ADJ"), ("ive", "ADJ"),
    ("less", "ADJ"), ("al", "ADJ"), ("ic", "ADJ"),
)
_NUMBER = re.compile(r"^[+-]?\d+([.,]\d+)*\w*$")


def _fallback_tag(word: str) -> str:
    low = word.lower()
    if low in _WORD_TAGS:
        return _WORD_TAGS[low]
    if not any(ch.isalnum() for ch in word):
        return "."
    if _NUMBER.match(word):
        return "NUM"
    for suffix, tag in _SUFFIXES:
        if low.endswith(suffix) and len(low) > len(suffix) + 2:
            return tag
    return "NOUN"


def tag_pos(tokens: Sequence, sidecar: Sequence[str] | None = None) -> list[str]:
    """One universal POS tag per token.

    Tags from ``sidecar`` (e.g. produced by an external tagger) are passed
    through unchanged; otherwise a small lexicon and suffix tagger is used.
    """
    words = [getattr(t, "text", t) for t in tokens]
    if not words:
        raise ValueError("cannot tag an empty token list")
    if sidecar is not None:
        if len(sidecar) != len(words):
            raise ValueError(f"{len(sidecar)} sidecar tags for {len(words)} tokens")
        return list(sidecar)
    return [_fallback_tag(w) for w in words]


def read_pos_sidecar(path) -> list[list[tuple[str, str]]]:
    """``token<TAB>tag`` lines, sentences separated by blank lines."""
    sentences: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(current)
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'token<TAB>tag'")
            current.append((parts[0], parts[1]))
    if current:
        sentences.append(current)
    return sentences
