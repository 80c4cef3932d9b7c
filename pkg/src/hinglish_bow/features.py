"""Frequency-thresholded bag-of-ngrams vocabulary and dense featurization."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .corpus import ProcessedTweet

Ngram = tuple[str, ...]

VOCAB_HEADER = "vocab v1"


class VocabularyError(ValueError):
    pass


class FeatureMode(enum.Enum):
    BINARY = "binary"
    COUNT = "count"

    @classmethod
    def parse(cls, text: str) -> "FeatureMode":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown feature mode {text!r} (expected binary or count)") from None


def fold_case(token: str) -> str:
    # str.lower() is the full mapping; U+0130 is the only code point whose
    # full lowercase differs from its simple lowercase ("i").
    return token.replace("İ", "i").lower()


def english_stopwords() -> frozenset[str]:
    text = resources.files(__package__).joinpath("data/stopwords_en.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_stopwords(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as f:
        return frozenset(w.strip() for w in f if w.strip())


@dataclass(frozen=True)
class VocabConfig:
    K: int
    N: int = 1
    stopwords: frozenset[str] = field(default_factory=frozenset)
    case_fold: bool = True

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"frequency threshold K must be >= 1, got {self.K}")
        if self.N < 1:
            raise ValueError(f"max ngram order N must be >= 1, got {self.N}")


def extract_ngrams(tokens: Sequence[str], N: int, case_fold: bool = True) -> Counter:
    """All contiguous ngrams of order 1..N, with multiplicities."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if case_fold:
        tokens = [fold_case(t) for t in tokens]
    else:
        tokens = list(tokens)
    counts: Counter = Counter()
    for n in range(1, min(N, len(tokens)) + 1):
        counts.update(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))
    return counts


def _corpus_counts(corpus: Iterable[ProcessedTweet], N: int, case_fold: bool) -> Counter:
    total: Counter = Counter()
    for tweet in corpus:
        total.update(extract_ngrams(tweet.tokens, N, case_fold))
    return total


class Vocabulary:
    """Immutable ngram -> column index map, ordered by (order, tokens)."""

    def __init__(self, ngrams: Iterable[Ngram], config: VocabConfig):
        ordered = sorted(set(ngrams), key=lambda g: (len(g), g))
        if any(not 1 <= len(g) <= config.N for g in ordered):
            raise VocabularyError(f"ngram order outside 1..{config.N}")
        self.config = config
        self._entries = {g: i for i, g in enumerate(ordered)}
        self._ngrams = tuple(ordered)

    def __len__(self) -> int:
        return len(self._ngrams)

    def __contains__(self, ngram) -> bool:
        return ngram in self._entries

    def __iter__(self):
        return iter(self._ngrams)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (self._ngrams == other._ngrams and self.config.K == other.config.K
                and self.config.N == other.config.N and self.config.case_fold == other.config.case_fold)

    def index(self, ngram: Ngram) -> int:
        return self._entries[ngram]

    def get(self, ngram: Ngram, default=None):
        return self._entries.get(ngram, default)

    @property
    def entries(self) -> dict[Ngram, int]:
        return dict(self._entries)

    def ngrams_of_order(self, order: int) -> list[Ngram]:
        return [g for g in self._ngrams if len(g) == order]

    def dump(self, stream) -> None:
        c = self.config
        stream.write(f"{VOCAB_HEADER} K={c.K} N={c.N} case_fold={int(c.case_fold)}\n")
        for i, g in enumerate(self._ngrams):
            stream.write(f"{i}\t{' '.join(g)}\n")

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            self.dump(f)

    @classmethod
    def parse(cls, lines: Iterable[str]) -> "Vocabulary":
        it = iter(lines)
        header = next(it, "").rstrip("\r\n")
        parts = header.split(" ")
        if " ".join(parts[:2]) != VOCAB_HEADER or len(parts) != 5:
            raise VocabularyError(f"bad vocabulary header: {header!r}")
        try:
            opts = dict(p.split("=", 1) for p in parts[2:])
            config = VocabConfig(K=int(opts["K"]), N=int(opts["N"]), case_fold=opts["case_fold"] == "1")
        except (KeyError, ValueError) as exc:
            raise VocabularyError(f"bad vocabulary header: {header!r}") from exc
        ngrams = []
        for lineno, raw in enumerate(it, start=2):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            idx, sep, text = line.partition("\t")
            if not sep or not text or idx != str(len(ngrams)):
                raise VocabularyError(f"line {lineno}: malformed vocabulary entry {line!r}")
            ngrams.append(tuple(text.split(" ")))
        vocab = cls(ngrams, config)
        if vocab._ngrams != tuple(ngrams):
            raise VocabularyError("vocabulary entries are not in canonical order or contain duplicates")
        return vocab

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as f:
            return cls.parse(f)


def build_vocabulary(corpus: Sequence[ProcessedTweet], config: VocabConfig) -> Vocabulary:
    """Keep ngrams of order 1..N occurring at least K times in total, minus unigram stop words."""
    if not corpus:
        raise VocabularyError("cannot build a vocabulary from an empty corpus")
    counts = _corpus_counts(corpus, config.N, config.case_fold)
    stop = {fold_case(w) for w in config.stopwords} if config.case_fold else set(config.stopwords)
    kept = [g for g, c in counts.items()
            if c >= config.K and not (len(g) == 1 and g[0] in stop)]
    if not kept:
        raise VocabularyError(f"empty vocabulary: no ngram occurs at least K={config.K} times")
    return Vocabulary(kept, config)


def count_frequent_ngrams(corpus: Sequence[ProcessedTweet], K: int, order: int, case_fold: bool = True) -> int:
    """Distinct ngrams of exactly ``order`` with corpus count >= K, before stop-word removal."""
    if K < 1 or order < 1:
        raise ValueError("K and order must be positive")
    counts: Counter = Counter()
    for tweet in corpus:
        toks = [fold_case(t) for t in tweet.tokens] if case_fold else tweet.tokens
        counts.update(tuple(toks[i:i + order]) for i in range(len(toks) - order + 1))
    return sum(1 for c in counts.values() if c >= K)


def vectorize(tweet: ProcessedTweet, vocab: Vocabulary, mode: FeatureMode = FeatureMode.BINARY) -> np.ndarray:
    return vectorize_tokens(tweet.tokens, vocab, mode)


def vectorize_tokens(tokens: Sequence[str], vocab: Vocabulary, mode: FeatureMode = FeatureMode.BINARY) -> np.ndarray:
    if len(vocab) == 0:
        raise VocabularyError("empty vocabulary")
    x = np.zeros(len(vocab), dtype=np.float64)
    for g, c in extract_ngrams(tokens, vocab.config.N, vocab.config.case_fold).items():
        j = vocab.get(g)
        if j is not None:
            x[j] = 1.0 if mode is FeatureMode.BINARY else float(c)
    return x


def vectorize_corpus(corpus: Sequence[ProcessedTweet], vocab: Vocabulary,
                     mode: FeatureMode = FeatureMode.BINARY) -> np.ndarray:
    """Stack feature vectors into a (len(corpus), len(vocab)) matrix."""
    X = np.zeros((len(corpus), len(vocab)), dtype=np.float64)
    for row, tweet in enumerate(corpus):
        X[row] = vectorize_tokens(tweet.tokens, vocab, mode)
    return X
