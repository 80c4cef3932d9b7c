import io
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hinglish_bow.corpus import Label, ProcessedTweet
from hinglish_bow.features import (
    FeatureMode,
    VocabConfig,
    Vocabulary,
    VocabularyError,
    build_vocabulary,
    count_frequent_ngrams,
    english_stopwords,
    extract_ngrams,
    fold_case,
    vectorize,
    vectorize_corpus,
)


def tw(*tokens, tweet_id=0):
    return ProcessedTweet(tweet_id, Label.NEUTRAL, tuple(tokens))


def test_extract_ngrams_examples():
    assert extract_ngrams(["best", "couple"], 2) == Counter({("best",): 1, ("couple",): 1, ("best", "couple"): 1})
    assert extract_ngrams([], 3) == Counter()
    assert extract_ngrams(["a", "a"], 1) == Counter({("a",): 2})


def test_extract_ngrams_case_folding():
    assert extract_ngrams(["Best", "BEST"], 1) == Counter({("best",): 2})
    assert extract_ngrams(["Best", "BEST"], 1, case_fold=False) == Counter({("Best",): 1, ("BEST",): 1})


def test_extract_ngrams_brute_force():
    tokens = list("abcabd")
    got = extract_ngrams(tokens, 3)
    expected = Counter()
    for i in range(len(tokens)):
        for j in range(i + 1, min(i + 3, len(tokens)) + 1):
            expected[tuple(tokens[i:j])] += 1
    assert got == expected


def test_fold_case_simple_mapping():
    assert fold_case("İstanbul") == "istanbul"
    assert fold_case("ACCHA") == "accha"


def test_build_vocabulary_threshold():
    corpus = [tw("good", "x1"), tw("good", "x2"), tw("very", "good")]
    vocab = build_vocabulary(corpus, VocabConfig(K=3))
    assert ("good",) in vocab and len(vocab) == 1
    with pytest.raises(VocabularyError, match="empty vocabulary"):
        build_vocabulary(corpus, VocabConfig(K=4))


def test_build_vocabulary_stopwords_unigrams_only():
    vocab = build_vocabulary([tw("the", "end")], VocabConfig(K=1, stopwords=frozenset({"the"})))
    assert vocab.entries == {("end",): 0}
    vocab2 = build_vocabulary([tw("The", "end")], VocabConfig(K=1, N=2, stopwords=frozenset({"the"})))
    assert vocab2.entries == {("end",): 0, ("the", "end"): 1}


def test_build_vocabulary_counts_occurrences_not_documents():
    vocab = build_vocabulary([tw("wah", "wah", "wah")], VocabConfig(K=3))
    assert ("wah",) in vocab


def test_vocabulary_order():
    corpus = [tw("b", "a", "c", "a", "b")]
    vocab = build_vocabulary(corpus, VocabConfig(K=1, N=2))
    assert list(vocab) == [("a",), ("b",), ("c",), ("a", "b"), ("a", "c"), ("b", "a"), ("c", "a")]
    assert [vocab.index(g) for g in vocab] == list(range(len(vocab)))


def test_config_validation():
    with pytest.raises(ValueError):
        VocabConfig(K=0)
    with pytest.raises(ValueError):
        VocabConfig(K=1, N=0)


def test_vectorize_examples():
    vocab = Vocabulary([("best",), ("couple",), ("zzz",)], VocabConfig(K=1))
    tweet = tw("best", "best", "couple")
    np.testing.assert_array_equal(vectorize(tweet, vocab, FeatureMode.BINARY), [1, 1, 0])
    np.testing.assert_array_equal(vectorize(tweet, vocab, FeatureMode.COUNT), [2, 1, 0])
    for mode in FeatureMode:
        np.testing.assert_array_equal(vectorize(tw("unrelated"), vocab, mode), [0, 0, 0])


def test_vectorize_uses_vocab_ngram_order_and_folding():
    vocab = build_vocabulary([tw("Bahut", "accha")], VocabConfig(K=1, N=2))
    x = vectorize(tw("bahut", "ACCHA"), vocab, FeatureMode.COUNT)
    np.testing.assert_array_equal(x, [1, 1, 1])


def test_count_frequent_ngrams():
    corpus = [tw("a", "b", "c"), tw("a", "b")]
    assert count_frequent_ngrams(corpus, K=1, order=1) == 3
    assert count_frequent_ngrams(corpus, K=2, order=2) == 1
    assert count_frequent_ngrams([tw("a", "b")], K=2, order=2) == 0
    assert count_frequent_ngrams([tw("the", "the")], K=2, order=1) == 1


def test_vocab_file_format_and_round_trip(tmp_path):
    vocab = build_vocabulary([tw("b", "a", "b")], VocabConfig(K=1, N=2))
    buf = io.StringIO()
    vocab.dump(buf)
    assert buf.getvalue() == "vocab v1 K=1 N=2 case_fold=1\n0\ta\n1\tb\n2\ta b\n3\tb a\n"
    path = tmp_path / "vocab.txt"
    vocab.save(path)
    again = Vocabulary.load(path)
    assert again == vocab and again.entries == vocab.entries
    again.save(tmp_path / "vocab2.txt")
    assert (tmp_path / "vocab2.txt").read_bytes() == path.read_bytes()


@pytest.mark.parametrize("text", [
    "",
    "vocab v2 K=1 N=1 case_fold=1\n",
    "vocab v1 K=1 N=1 case_fold=1\n1\ta\n",
    "vocab v1 K=1 N=1 case_fold=1\n0\tb\n1\ta\n",
    "vocab v1 K=1 N=1 case_fold=1\n0\ta b\n",
])
def test_vocab_file_errors(text):
    with pytest.raises(VocabularyError):
        Vocabulary.parse(io.StringIO(text))


def test_bundled_stopwords():
    stop = english_stopwords()
    assert {"the", "and", "is"} <= stop
    assert "accha" not in stop


words = st.sampled_from(["a", "b", "c", "d", "e", "The", "the", "is", "x"])
tweets = st.lists(words, min_size=0, max_size=10).map(lambda ts: tw(*ts))
corpora = st.lists(tweets, min_size=1, max_size=15)


def _vocab_or_empty(corpus, **kw):
    try:
        return set(build_vocabulary(corpus, VocabConfig(**kw)))
    except VocabularyError:
        return set()


@given(corpora, st.integers(1, 5), st.integers(1, 5), st.integers(1, 3))
def test_monotone_in_k(corpus, k1, k2, n):
    k1, k2 = sorted((k1, k2))
    assert _vocab_or_empty(corpus, K=k2, N=n) <= _vocab_or_empty(corpus, K=k1, N=n)


@given(corpora, st.integers(1, 4), st.integers(1, 3))
def test_monotone_in_n(corpus, k, n):
    lower = _vocab_or_empty(corpus, K=k, N=n)
    upper = {g for g in _vocab_or_empty(corpus, K=k, N=n + 1) if len(g) <= n}
    assert lower == upper


@settings(max_examples=50)
@given(corpora)
def test_deterministic_indices(corpus):
    a = _vocab_or_empty(corpus, K=1, N=2)
    if a:
        v1 = build_vocabulary(corpus, VocabConfig(K=1, N=2))
        v2 = build_vocabulary(list(corpus), VocabConfig(K=1, N=2))
        assert v1.entries == v2.entries


@given(corpora)
def test_count_vector_sums_to_non_stopword_tokens(corpus):
    stop = frozenset({"the", "is"})
    try:
        vocab = build_vocabulary(corpus, VocabConfig(K=1, N=1, stopwords=stop))
    except VocabularyError:
        return
    X = vectorize_corpus(corpus, vocab, FeatureMode.COUNT)
    for tweet, row in zip(corpus, X):
        assert row.sum() == sum(1 for t in tweet.tokens if t.lower() not in stop)


@given(corpora, tweets)
def test_binary_is_clipped_count(corpus, tweet):
    vocab = Vocabulary(sorted({g for t in corpus for g in extract_ngrams(t.tokens, 2)}) or [("a",)], VocabConfig(K=1, N=2))
    b = vectorize(tweet, vocab, FeatureMode.BINARY)
    c = vectorize(tweet, vocab, FeatureMode.COUNT)
    np.testing.assert_array_equal(b, np.minimum(c, 1))
