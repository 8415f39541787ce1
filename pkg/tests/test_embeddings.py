import numpy as np
import pytest

from causal_rntn.embeddings import (POS50, POS75, POS100, TAGSET, UNK, DimMismatch,
                                    MalformedVector, PosWeighting, ShortInput, Vocab,
                                    build_pos_table, init_random, load_pretrained, pos_concat,
                                    pos_key, pos_vector, read_pos_sidecar, read_vectors, tag_pos)


def test_vocab_unk_and_bijection():
    v = Vocab.from_corpus([["b", "a", "b"], ["c"]])
    assert v.itos == [UNK, "a", "b", "c"]
    assert [v.stoi[w] for w in v.itos] == [0, 1, 2, 3]
    assert v.index("zzz") == 0
    assert v.index("zzz", "c") == 3


def test_init_random_range_and_seed():
    v = Vocab(["a", "b"])
    t = init_random(v, 60, r=1e-4, seed=3)
    assert t.matrix.shape == (3, 60)
    assert np.abs(t.matrix).max() <= 1e-4
    assert t.trainable
    assert np.array_equal(t.matrix, init_random(v, 60, r=1e-4, seed=3).matrix)
    assert not np.array_equal(t.matrix, init_random(v, 60, r=1e-4, seed=4).matrix)
    assert list(t.rows(["b", "nope"])) == [2, 0]


@pytest.mark.parametrize("w,pos,pre", [(POS50, 30, 30), (POS75, 45, 15), (POS100, 60, 0)])
def test_weightings_total_60(w, pos, pre):
    assert (w.pos_dims, w.pretrained_dims, w.dim) == (pos, pre, 60)


def test_pos_concat_layout():
    word = np.arange(1.0, 41.0)
    pos = pos_vector("VERB", 45)
    out = pos_concat(word, pos, POS75)
    assert out.shape == (60,)
    assert np.array_equal(out[:45], pos)
    assert np.array_equal(out[45:], word[:15])
    assert out[TAGSET.index("VERB")] == 1.0 and out[:45].sum() == 1.0
    assert np.array_equal(pos_concat([], pos_vector("X", 60), POS100)[:12], pos_vector("X", 12))


def test_pos_concat_short_input():
    with pytest.raises(ShortInput):
        pos_concat(np.zeros(10), pos_vector("NOUN", 30), POS50)
    with pytest.raises(ShortInput):
        pos_concat(np.zeros(30), np.zeros(10), POS50)
    with pytest.raises(ValueError):
        PosWeighting(0, 0)


def write_vectors(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_read_vectors(tmp_path):
    p = write_vectors(tmp_path / "v.txt", ["2 3", "a 1 2 3", "b 4 5 6"])
    vecs = read_vectors(p, 3)
    assert np.array_equal(vecs["b"], [4, 5, 6])
    assert np.array_equal(read_vectors(p, 2, truncate=True)["a"], [1, 2])
    with pytest.raises(DimMismatch):
        read_vectors(p, 2)
    with pytest.raises(DimMismatch):
        read_vectors(p, 4)


def test_read_vectors_malformed(tmp_path):
    with pytest.raises(MalformedVector) as info:
        read_vectors(write_vectors(tmp_path / "v.txt", ["a 1 2", "b 1 x"]), 2)
    assert info.value.lineno == 2
    with pytest.raises(MalformedVector):
        read_vectors(write_vectors(tmp_path / "w.txt", ["a 1 nan"]), 2)


def test_load_pretrained_reports_missing(tmp_path):
    p = write_vectors(tmp_path / "v.txt", ["a 1 2"])
    table = load_pretrained(p, Vocab(["a", "b"]), 2)
    assert not table.trainable
    assert table.missing == ["b"]
    assert np.array_equal(table.matrix[1], [1, 2])
    assert np.array_equal(table.matrix[2], [0, 0])


def test_pos_table_rows():
    tagged = [[("A", "NOUN"), ("fails", "VERB"), (".", ".")]]
    pre = {"A": np.full(30, 0.5), "fails": np.full(30, -0.5), ".": np.zeros(30)}
    table = build_pos_table(tagged, pre, POS50)
    assert not table.trainable and table.dim == 60
    rows = table.rows(["A", "fails", "B"], ["NOUN", "VERB", "NOUN"])
    assert table.vocab.itos[rows[0]] == pos_key("A", "NOUN")
    assert table.vocab.itos[rows[2]] == pos_key(UNK, "NOUN")
    assert np.array_equal(table.matrix[rows[1]][30:], np.full(30, -0.5))
    assert table.matrix[rows[2]][TAGSET.index("NOUN")] == 1.0
    assert not table.matrix[rows[2]][30:].any()


def test_tagger():
    assert tag_pos(["If", "the", "valve", "is", "open", ",", "then", "1280", "bits", "."]) == [
        "ADP", "DET", "NOUN", "VERB", "NOUN", ".", "ADV", "NUM", "NOUN", "."]
    assert tag_pos(["a", "b"], sidecar=["X", "Y"]) == ["X", "Y"]
    with pytest.raises(ValueError):
        tag_pos(["a"], sidecar=["X", "Y"])


def test_sidecar(tmp_path):
    p = tmp_path / "pos.tsv"
    p.write_text("A\tNOUN\nfails\tVERB\n\nB\tNOUN\n")
    assert read_pos_sidecar(p) == [[("A", "NOUN"), ("fails", "VERB")], [("B", "NOUN")]]
