import pytest

from btcurator.corpus import (
    Corpus,
    TokenizerConfig,
    corpus_from_lines,
    load_corpus,
    load_parallel_corpus,
    tokenize,
)
from btcurator.errors import DataError


def test_tokenize_whitespace_collapse_and_lowercase():
    assert tokenize("The  cat", TokenizerConfig(lowercase=True)) == ["the", "cat"]


def test_tokenize_tab_is_whitespace():
    assert tokenize("a\tb c") == ["a", "b", "c"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_passthrough_preserves_case():
    cfg = TokenizerConfig(mode="passthrough")
    assert tokenize("The Cat", cfg) == ["The", "Cat"]


def test_tokenize_idempotent_on_passthrough():
    cfg = TokenizerConfig(mode="passthrough")
    once = tokenize("a b c", cfg)
    assert tokenize(" ".join(once), cfg) == once


def test_load_corpus_skips_blank_lines(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("a b\n\nc\n", encoding="utf-8")
    corpus = load_corpus(str(path), "x")
    assert len(corpus) == 2
    assert [s.id for s in corpus] == [0, 1]
    assert corpus[1].tokens == ("c",)


def test_load_corpus_single_line(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("hello world\n", encoding="utf-8")
    corpus = load_corpus(str(path), "x")
    assert corpus[0].id == 0
    assert corpus[0].tokens == ("hello", "world")


def test_load_corpus_empty_file_errors(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("", encoding="utf-8")
    with pytest.raises(DataError, match="zero usable lines"):
        load_corpus(str(path), "x")


def test_load_corpus_missing_file_errors():
    with pytest.raises(DataError):
        load_corpus("/nonexistent/corpus.txt", "x")


def test_raw_lines_round_trip(tmp_path):
    lines = ["a b", "", "c d  e", "f"]
    path = tmp_path / "c.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    corpus = load_corpus(str(path), "x")
    assert [s.raw for s in corpus] == [l for l in lines if l.strip()]


def test_dedup_exact_raw_match():
    corpus = corpus_from_lines(["a b", "a b", "c"], "x", dedup=True)
    assert len(corpus) == 2
    assert [s.id for s in corpus] == [0, 1]


def test_ids_dense_and_unique():
    corpus = corpus_from_lines([f"w{i}" for i in range(20)], "x")
    ids = [s.id for s in corpus]
    assert ids == list(range(20))


def test_parallel_corpus_rejects_length_mismatch(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("x\ny\n", encoding="utf-8")
    b.write_text("u\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_parallel_corpus(str(a), str(b))


def test_parallel_corpus_rejects_blank_line(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("x\n\nz\n", encoding="utf-8")
    b.write_text("u\nv\nw\n", encoding="utf-8")
    with pytest.raises(DataError, match="blank line"):
        load_parallel_corpus(str(a), str(b))


def test_parallel_corpus_pairs(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("x y\nz\n", encoding="utf-8")
    b.write_text("u\nv w\n", encoding="utf-8")
    par = load_parallel_corpus(str(a), str(b))
    assert len(par) == 2
    pairs = list(par.pairs())
    assert pairs[0][0].tokens == ("x", "y")
    assert pairs[1][1].tokens == ("v", "w")
