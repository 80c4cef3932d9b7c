"""Reading CoNLL-style language-tagged tweet files and the simple TSV format.

A CoNLL record starts with a ``meta`` line carrying the tweet id and,
for labeled data, its sentiment; each following line is a
``surface<whitespace>tag`` pair::

    meta    173     positive
    @       O
    BeingSalmanKhan Eng
    It      Eng
    ...

The simple format holds one tweet per line: ``id<TAB>tokens<TAB>label``,
with ``-`` standing in for a missing label.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, TextIO


class CorpusError(ValueError):
    """Malformed corpus input. ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: Optional[int] = None, line: Optional[str] = None):
        self.lineno = lineno
        self.line = line
        if lineno is not None:
            message = f"line {lineno}: {message}"
            if line is not None:
                message += f": {line!r}"
        super().__init__(message)


class Label(enum.IntEnum):
    NEGATIVE = 0
    NEUTRAL = 1
    POSITIVE = 2

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown label {text!r}") from None

    @property
    def text(self) -> str:
        return self.name.lower()


class LangTag(enum.Enum):
    ENG = "Eng"
    HIN = "Hin"
    OTHER = "O"

    @classmethod
    def parse(cls, text: str) -> "LangTag":
        folded = text.strip().lower()
        for tag in cls:
            if tag.value.lower() == folded:
                return tag
        raise ValueError(f"unknown language tag {text!r}")


@dataclass(frozen=True)
class RawToken:
    surface: str
    tag: LangTag


@dataclass(frozen=True)
class RawTweet:
    id: int
    label: Optional[Label]
    tokens: tuple[RawToken, ...]


@dataclass(frozen=True)
class ProcessedTweet:
    id: int
    label: Optional[Label]
    tokens: tuple[str, ...]


def parse_conll(stream: Iterable[str]) -> list[RawTweet]:
    """Parse meta-delimited CoNLL records from an iterable of lines.

    Raises CorpusError (with the line number) on token lines outside a
    record, bad ids, labels or tags, records without tokens, and ids
    repeated within the same input.
    """
    tweets: list[RawTweet] = []
    seen: dict[int, int] = {}
    current = None  # (id, label, tokens, meta lineno)

    def close():
        if current is None:
            return
        tweet_id, label, tokens, meta_lineno = current
        if not tokens:
            raise CorpusError(f"tweet {tweet_id} has no tokens", meta_lineno)
        tweets.append(RawTweet(tweet_id, label, tuple(tokens)))

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        fields = line.split()
        if not fields:
            continue
        if fields[0].lower() == "meta":
            close()
            if len(fields) not in (2, 3):
                raise CorpusError("meta line needs an id and an optional label", lineno, line)
            try:
                tweet_id = int(fields[1])
            except ValueError:
                raise CorpusError("non-integer tweet id", lineno, line) from None
            if tweet_id < 0:
                raise CorpusError("negative tweet id", lineno, line)
            if tweet_id in seen:
                raise CorpusError(f"duplicate tweet id {tweet_id} (first at line {seen[tweet_id]})", lineno, line)
            seen[tweet_id] = lineno
            label = None
            if len(fields) == 3:
                try:
                    label = Label.parse(fields[2])
                except ValueError as exc:
                    raise CorpusError(str(exc), lineno, line) from None
            current = (tweet_id, label, [], lineno)
            continue
        if current is None:
            raise CorpusError("token line before any meta line", lineno, line)
        if len(fields) < 2:
            raise CorpusError("token line needs a surface form and a language tag", lineno, line)
        try:
            tag = LangTag.parse(fields[1])
        except ValueError as exc:
            raise CorpusError(str(exc), lineno, line) from None
        current[2].append(RawToken(fields[0], tag))
    close()
    return tweets


_URL_PREFIXES = ("http://", "https://", "www.")


def is_url(surface: str) -> bool:
    lowered = surface.lower()
    return lowered.startswith(_URL_PREFIXES) or "://" in lowered


def preprocess(tweet: RawTweet) -> ProcessedTweet:
    """Drop usernames ("@" plus the next token) and URLs; keep everything else as is."""
    kept = []
    skip_next = False
    for token in tweet.tokens:
        if skip_next:
            skip_next = False
            continue
        if token.surface == "@":
            skip_next = True
            continue
        if is_url(token.surface):
            continue
        kept.append(token.surface)
    return ProcessedTweet(tweet.id, tweet.label, tuple(kept))


def load_conll(path) -> list[ProcessedTweet]:
    with open(path, encoding="utf-8") as f:
        return [preprocess(t) for t in parse_conll(f)]


def write_simple_format(corpus: Iterable[ProcessedTweet], output: TextIO) -> None:
    for tweet in corpus:
        label = tweet.label.text if tweet.label is not None else "-"
        output.write(f"{tweet.id}\t{' '.join(tweet.tokens)}\t{label}\n")


def read_simple_format(stream: Iterable[str]) -> list[ProcessedTweet]:
    corpus = []
    seen = set()
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorpusError(f"expected 3 tab-separated fields, got {len(fields)}", lineno, line)
        id_text, text, label_text = fields
        try:
            tweet_id = int(id_text)
        except ValueError:
            raise CorpusError("non-integer tweet id", lineno, line) from None
        if tweet_id < 0:
            raise CorpusError("negative tweet id", lineno, line)
        if tweet_id in seen:
            raise CorpusError(f"duplicate tweet id {tweet_id}", lineno, line)
        seen.add(tweet_id)
        label = None
        if label_text != "-":
            try:
                label = Label.parse(label_text)
            except ValueError as exc:
                raise CorpusError(str(exc), lineno, line) from None
        corpus.append(ProcessedTweet(tweet_id, label, tuple(text.split(" ")) if text else ()))
    return corpus


def load_corpus(path) -> list[ProcessedTweet]:
    """Load either format, sniffing the first non-blank line for ``meta``."""
    with open(path, encoding="utf-8") as f:
        lines = f.readlines()
    first = next((ln for ln in lines if ln.strip()), "")
    if first.split() and first.split()[0].lower() == "meta":
        return [preprocess(t) for t in parse_conll(lines)]
    return read_simple_format(lines)
