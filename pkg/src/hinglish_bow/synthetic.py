"""Synthetic three-class tweet corpora with class-indicative keyword families."""

from __future__ import annotations

import numpy as np

from .corpus import Label, ProcessedTweet

KEYWORDS = {
    Label.NEGATIVE: ("bakwas", "ghatiya", "bekar", "worst", "hate"),
    Label.NEUTRAL: ("kal", "news", "update", "match", "office"),
    Label.POSITIVE: ("accha", "badhiya", "mast", "awesome", "love"),
}


def make_corpus(n: int, seed: int, noise_vocab: int = 60, label_noise: float = 0.0,
                cross_talk: float = 0.0, start_id: int = 0) -> list[ProcessedTweet]:
    """Generate ``n`` labeled tweets.

    Each tweet carries 1-2 keywords from its class family plus 3-8 noise
    words. ``cross_talk`` is the chance of also adding a keyword from another
    family; ``label_noise`` is the chance the stored label is resampled
    uniformly. With both at 0 the classes are linearly separable.
    """
    rng = np.random.default_rng(seed)
    noise_words = [f"shabd{i}" for i in range(noise_vocab)]
    labels = list(Label)
    tweets = []
    for i in range(n):
        label = labels[int(rng.integers(3))]
        words = list(rng.choice(KEYWORDS[label], size=int(rng.integers(1, 3))))
        if cross_talk and rng.random() < cross_talk:
            other = labels[(int(label) + int(rng.integers(1, 3))) % 3]
            words.append(str(rng.choice(KEYWORDS[other])))
        words += list(rng.choice(noise_words, size=int(rng.integers(3, 9))))
        rng.shuffle(words)
        if label_noise and rng.random() < label_noise:
            label = labels[int(rng.integers(3))]
        tweets.append(ProcessedTweet(start_id + i, label, tuple(str(w) for w in words)))
    return tweets
