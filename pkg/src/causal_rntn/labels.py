"""Segment labels of the causality treebank and their numeric IDs."""

from enum import Enum


class Label(Enum):
    ROOT_SENTENCE = 1
    SYMBOL = 2
    PUNCT = 3
    AND = 4
    OR = 5
    KEY_C = 6
    KEY_NC = 7
    CONDITION = 8
    VARIABLE = 9
    STATEMENT = 10
    CAUSE = 11
    EFFECT = 12
    CAUSE_EFFECT_RELATION = 13
    SEPARATED_CAUSE = 14
    INSERTION = 15
    NEGATION = 16
    NON_CAUSAL = 17
    SEPARATED_STATEMENT = 18
    SEPARATED_AND = 19
    SENTENCE = 20
    SEPARATED_CAUSE_EFFECT_RELATION = 21
    SEPARATED_NEGATION = 22
    WORD = 23
    SEPARATED_NON_CAUSAL = 24
    SEPARATED_OR = 25
    SEPARATED_EFFECT = 26
    SEPARATED_VARIABLE = 27

    @property
    def id(self) -> int:
        return self.value

    @property
    def display(self) -> str:
        return DISPLAY_NAMES[self]

    @classmethod
    def from_id(cls, label_id: int) -> "Label":
        try:
            return cls(label_id)
        except ValueError:
            raise UnknownLabelId(label_id) from None

    @classmethod
    def from_name(cls, name: str) -> "Label":
        """Resolve a brat entity type such as ``Key-C`` or ``CauseEffectRelation``."""
        key = _normalize(name)
        try:
            return _BY_NORMALIZED[key]
        except KeyError:
            raise UnknownLabelName(name) from None


class UnknownLabelId(ValueError):
    def __init__(self, label_id):
        super().__init__(f"unknown label id: {label_id}")
        self.label_id = label_id


class UnknownLabelName(ValueError):
    def __init__(self, name):
        super().__init__(f"unknown label name: {name!r}")
        self.name = name


DISPLAY_NAMES = {
    Label.ROOT_SENTENCE: "RootSentence",
    Label.SYMBOL: "Symbol",
    Label.PUNCT: "Punct",
    Label.AND: "And",
    Label.OR: "Or",
    Label.KEY_C: "Key-C",
    Label.KEY_NC: "Key-NC",
    Label.CONDITION: "Condition",
    Label.VARIABLE: "Variable",
    Label.STATEMENT: "Statement",
    Label.CAUSE: "Cause",
    Label.EFFECT: "Effect",
    Label.CAUSE_EFFECT_RELATION: "CauseEffectRelation",
    Label.SEPARATED_CAUSE: "SeparatedCause",
    Label.INSERTION: "Insertion",
    Label.NEGATION: "Negation",
    Label.NON_CAUSAL: "Non-causal",
    Label.SEPARATED_STATEMENT: "SeparatedStatement",
    Label.SEPARATED_AND: "SeparatedAnd",
    Label.SENTENCE: "Sentence",
    Label.SEPARATED_CAUSE_EFFECT_RELATION: "SeparatedCauseEffectRelation",
    Label.SEPARATED_NEGATION: "SeparatedNegation",
    Label.WORD: "Word",
    Label.SEPARATED_NON_CAUSAL: "SeparatedNonCausal",
    Label.SEPARATED_OR: "SeparatedOr",
    Label.SEPARATED_EFFECT: "SeparatedEffect",
    Label.SEPARATED_VARIABLE: "SeparatedVariable",
}

NUM_LABELS = len(Label)

MANUAL_LABELS = frozenset({
    Label.VARIABLE, Label.CONDITION, Label.NEGATION, Label.STATEMENT,
    Label.NON_CAUSAL, Label.KEY_C, Label.CAUSE, Label.EFFECT,
    Label.CAUSE_EFFECT_RELATION, Label.AND, Label.OR, Label.ROOT_SENTENCE,
    Label.KEY_NC, Label.INSERTION, Label.SENTENCE,
})

AUTOMATIC_LABELS = frozenset(Label) - MANUAL_LABELS

# Labels the exporter gives to bare tokens.
TOKEN_LABELS = frozenset({Label.WORD, Label.PUNCT, Label.SYMBOL})

# Manual labels that may annotate a single token; the token leaf then carries
# the annotation label itself, e.g. ``(6 when)`` or ``(9 SEP)``.
SINGLE_TOKEN_LABELS = frozenset({
    Label.VARIABLE, Label.CONDITION, Label.NEGATION, Label.NON_CAUSAL,
    Label.KEY_C, Label.KEY_NC, Label.INSERTION,
})

LEAF_LABELS = TOKEN_LABELS | SINGLE_TOKEN_LABELS

SEPARATED = {
    Label.CAUSE: Label.SEPARATED_CAUSE,
    Label.STATEMENT: Label.SEPARATED_STATEMENT,
    Label.AND: Label.SEPARATED_AND,
    Label.CAUSE_EFFECT_RELATION: Label.SEPARATED_CAUSE_EFFECT_RELATION,
    Label.NEGATION: Label.SEPARATED_NEGATION,
    Label.NON_CAUSAL: Label.SEPARATED_NON_CAUSAL,
    Label.OR: Label.SEPARATED_OR,
    Label.EFFECT: Label.SEPARATED_EFFECT,
    Label.VARIABLE: Label.SEPARATED_VARIABLE,
}


def _normalize(name: str) -> str:
    # "Seperated" is a misspelling found in existing annotation files.
    key = "".join(ch for ch in name.lower() if ch.isalnum())
    return key.replace("seperated", "separated")


_BY_NORMALIZED = {_normalize(name): label for label, name in DISPLAY_NAMES.items()}
