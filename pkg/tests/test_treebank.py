import pytest
from hypothesis import given, settings

from causal_rntn.labels import DISPLAY_NAMES, MANUAL_LABELS, AUTOMATIC_LABELS, Label
from causal_rntn.treebank import (EmptyLeaf, NonBinaryNode, ParseTree, Token, UnbalancedParens,
                                  UnknownLabelId, ngram_length, parse_bracketed, read_treebank,
                                  serialize_bracketed, tokenize, validate_schema, write_treebank)

from .strategies import trees


class TestLabels:
    def test_count(self):
        assert len(Label) == 27
        assert len({lab.id for lab in Label}) == 27
        assert len(MANUAL_LABELS) == 15
        assert len(AUTOMATIC_LABELS) == 12

    @pytest.mark.parametrize("name,label_id", [
        ("RootSentence", 1), ("Symbol", 2), ("Punct", 3), ("And", 4), ("Key-C", 6),
        ("Condition", 8), ("Variable", 9), ("Statement", 10), ("Cause", 11), ("Effect", 12),
        ("CauseEffectRelation", 13), ("SeparatedCause", 14), ("Negation", 16),
        ("Non-causal", 17), ("Sentence", 20), ("Word", 23),
    ])
    def test_ids_read_from_published_trees(self, name, label_id):
        assert Label.from_name(name).id == label_id

    def test_remaining_ids_fill_gaps_in_listing_order(self):
        assert [Label.from_name(n).id for n in (
            "Or", "Key-NC", "Insertion", "SeparatedStatement", "SeparatedAnd",
            "SeparatedCauseEffectRelation", "SeparatedNegation", "SeparatedNonCausal",
            "SeparatedOr", "SeparatedEffect", "SeparatedVariable")] == [
            5, 7, 15, 18, 19, 21, 22, 24, 25, 26, 27]

    def test_name_spellings(self):
        assert Label.from_name("SeperatedCause") is Label.SEPARATED_CAUSE
        assert Label.from_name("KeyC") is Label.KEY_C
        assert Label.from_name("Cause Effect Relation") is Label.CAUSE_EFFECT_RELATION
        for label, name in DISPLAY_NAMES.items():
            assert Label.from_name(name) is label


class TestParse:
    def test_condition_example(self):
        t = parse_bracketed("(8 (8 (8 (23 is) (23 always)) (23 1280)) (23 bits))")
        assert t.label is Label.CONDITION
        assert t.words() == ["is", "always", "1280", "bits"]
        assert t.n_leaves == 4
        assert len(t.nodes()) == 7

    def test_single_leaf(self):
        t = parse_bracketed("(23 hello)")
        assert t.is_leaf and t.label is Label.WORD and t.token == Token("hello", 0)

    def test_s1(self, reference_trees):
        s1 = reference_trees[0]
        assert s1.n_leaves == 16
        assert len(s1.nodes()) == 31
        assert s1.label is Label.ROOT_SENTENCE

    def test_whitespace_tolerance(self):
        a = parse_bracketed("(8 (23 is)(23 true))")
        b = parse_bracketed("  (8\n (23   is)\t(23 true) ) ")
        assert a == b

    @pytest.mark.parametrize("text,exc", [
        ("(8 (23 is) (23 true)", UnbalancedParens),
        ("(8 (23 is)) (23 true))", Exception),
        ("(99 x)", UnknownLabelId),
        ("(abc x)", UnknownLabelId),
        ("(8 (23 a) (23 b) (23 c))", NonBinaryNode),
        ("(8 (23 a))", NonBinaryNode),
        ("(8 a b)", NonBinaryNode),
        ("(8 a (23 b))", NonBinaryNode),
        ("(23)", EmptyLeaf),
    ])
    def test_errors(self, text, exc):
        with pytest.raises(exc):
            parse_bracketed(text)

    def test_non_binary_reports_position(self):
        with pytest.raises(NonBinaryNode) as info:
            parse_bracketed("(1 (8 (23 a) (23 b) (23 c)) (3 .))")
        assert info.value.position == 3


class TestSerialize:
    def test_leaf(self):
        assert serialize_bracketed(ParseTree.leaf(Label.WORD, "x", 0)) == "(23 x)"

    def test_condition(self):
        t = ParseTree.node(Label.CONDITION, ParseTree.leaf(Label.WORD, "is", 0),
                           ParseTree.leaf(Label.WORD, "true", 1))
        assert serialize_bracketed(t) == "(8 (23 is) (23 true))"

    def test_canonical_form(self, reference_strings):
        for s in reference_strings:
            out = serialize_bracketed(parse_bracketed(s))
            assert out == " ".join(s.replace(")(", ") (").split())
            assert not out.endswith(" ")

    def test_parentheses_in_tokens_are_escaped(self):
        t = ParseTree.node(Label.INSERTION, ParseTree.leaf(Label.SYMBOL, "(", 0),
                           ParseTree.leaf(Label.SYMBOL, ")", 1))
        assert serialize_bracketed(t) == "(15 (2 -LRB-) (2 -RRB-))"
        assert parse_bracketed(serialize_bracketed(t)) == t

    @settings(max_examples=1000, deadline=None)
    @given(trees())
    def test_round_trip(self, tree):
        text = serialize_bracketed(tree)
        assert parse_bracketed(text) == tree
        assert serialize_bracketed(parse_bracketed(text)) == text


class TestInvariants:
    @settings(max_examples=1000, deadline=None)
    @given(trees(max_leaves=30))
    def test_node_count_and_leaf_order(self, tree):
        n = len(tree.leaves())
        assert len(tree.nodes()) == 2 * n - 1 == tree.n_nodes
        assert [t.index for t in tree.tokens()] == list(range(n))
        for node in tree.postorder():
            assert ngram_length(node) == node.end - node.start

    def test_binary_enforced(self):
        leaf = ParseTree.leaf(Label.WORD, "a", 0)
        with pytest.raises(ValueError):
            ParseTree(Label.AND, (leaf,))
        with pytest.raises(ValueError):
            Token("two words", 0)


class TestSchema:
    def test_reference_trees_are_clean(self, reference_trees):
        for t in reference_trees:
            assert validate_schema(t) == []

    def test_leaf_with_internal_label(self):
        t = ParseTree.node(Label.ROOT_SENTENCE, ParseTree.leaf(Label.CAUSE, "x", 0),
                           ParseTree.leaf(Label.PUNCT, ".", 1))
        assert [v.kind for v in validate_schema(t)] == ["LeafWithInternalLabel"]

    def test_root_not_root_sentence(self):
        t = ParseTree.node(Label.STATEMENT, ParseTree.leaf(Label.VARIABLE, "A", 0),
                           ParseTree.leaf(Label.CONDITION, "fails", 1))
        assert [v.kind for v in validate_schema(t)] == ["RootNotRootSentence"]

    def test_nested_root_sentence(self):
        inner = ParseTree.node(Label.ROOT_SENTENCE, ParseTree.leaf(Label.WORD, "a", 0),
                               ParseTree.leaf(Label.WORD, "b", 1))
        t = ParseTree.node(Label.ROOT_SENTENCE, inner, ParseTree.leaf(Label.PUNCT, ".", 2))
        assert [v.kind for v in validate_schema(t)] == ["RootSentenceNotAtRoot"]

    def test_internal_word(self):
        t = ParseTree.node(Label.ROOT_SENTENCE,
                           ParseTree.node(Label.WORD, ParseTree.leaf(Label.WORD, "a", 0),
                                          ParseTree.leaf(Label.WORD, "b", 1)),
                           ParseTree.leaf(Label.PUNCT, ".", 2))
        assert [v.kind for v in validate_schema(t)] == ["InternalWithTokenLabel"]


class TestNgram:
    def test_values(self, reference_trees):
        assert ngram_length(parse_bracketed("(23 x)")) == 1
        assert ngram_length(parse_bracketed("(8 (23 is) (23 true))")) == 2
        s2_text = ("For example , when E=16 and I=5 , then the length occupied by the "
                   "check symbols is always 1280 bits .")
        assert ngram_length(reference_trees[1]) == len(s2_text.split()) == 21


class TestFiles:
    def test_round_trip(self, tmp_path, reference_trees):
        path = tmp_path / "tb.txt"
        write_treebank(reference_trees, path)
        assert read_treebank(path) == reference_trees

    def test_error_cites_line(self, tmp_path):
        path = tmp_path / "tb.txt"
        path.write_text("(23 a)\n\n(8 (23 a)\n")
        with pytest.raises(ValueError, match=":3:"):
            read_treebank(path)


def test_tokenize_detaches_trailing_punctuation():
    text = "For example, when E=16 and I=5, then x is 1.5 bits."
    toks = tokenize(text)
    assert [t for t, _, _ in toks] == ["For", "example", ",", "when", "E=16", "and", "I=5",
                                       ",", "then", "x", "is", "1.5", "bits", "."]
    for tok, s, e in toks:
        assert text[s:e] == tok
