"""Bootstrap aggregation of feedforward classifiers with plurality voting."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .corpus import Label
from .features import Vocabulary
from .network import (
    NUM_CLASSES,
    DimensionError,
    Network,
    NetworkConfig,
    TrainReport,
    predict_proba,
    train,
)

ENSEMBLE_HEADER = "ensemble v1"
MANIFEST_NAME = "manifest"
VOCAB_NAME = "vocab.txt"


class MemberTrainingError(RuntimeError):
    def __init__(self, index: int, cause: BaseException):
        self.index = index
        super().__init__(f"member {index}: {cause}")


@dataclass(frozen=True)
class EnsembleConfig:
    base: NetworkConfig
    num_bags: int = 10
    master_seed: int = 0

    def __post_init__(self):
        if self.num_bags < 1:
            raise ValueError("num_bags must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")


def member_seeds(master_seed: int, index: int) -> tuple[int, int]:
    """(network seed, resampling seed) for member ``index``.

    Derived through numpy's SeedSequence with spawn key ``(index,)``, so a
    member's seeds depend only on the master seed and its own index.
    """
    words = np.random.SeedSequence(master_seed, spawn_key=(index,)).generate_state(2, dtype=np.uint64)
    return int(words[0]), int(words[1])


def bootstrap_indices(n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise ValueError("cannot resample an empty dataset")
    return np.random.default_rng(seed).integers(0, n, size=n)


def bootstrap_sample(data: Sequence, seed: int) -> list:
    """len(data) uniform draws with replacement."""
    return [data[i] for i in bootstrap_indices(len(data), seed)]


@dataclass
class Ensemble:
    members: list[Network]
    config: EnsembleConfig

    def __post_init__(self):
        dims = {m.input_dim for m in self.members}
        if len(dims) > 1:
            raise DimensionError(f"ensemble members disagree on input_dim: {sorted(dims)}")
        if len(self.members) != self.config.num_bags:
            raise ValueError(f"expected {self.config.num_bags} members, got {len(self.members)}")

    @property
    def input_dim(self) -> int:
        return self.members[0].input_dim

    def save(self, directory, vocab: Vocabulary) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        vocab.save(d / VOCAB_NAME)
        with open(d / MANIFEST_NAME, "w", encoding="utf-8", newline="\n") as f:
            f.write(f"{ENSEMBLE_HEADER}\nB={self.config.num_bags}\n"
                    f"master_seed={self.config.master_seed}\nvocabulary={VOCAB_NAME}\n")
        for i, member in enumerate(self.members):
            member.save(d / f"member_{i}")

    @classmethod
    def load(cls, directory) -> tuple["Ensemble", Vocabulary]:
        d = Path(directory)
        with open(d / MANIFEST_NAME, encoding="utf-8") as f:
            lines = [ln.rstrip("\r\n") for ln in f if ln.strip()]
        if not lines or lines[0] != ENSEMBLE_HEADER:
            raise ValueError(f"{d / MANIFEST_NAME}: not an ensemble v1 manifest")
        meta = dict(ln.split("=", 1) for ln in lines[1:])
        B = int(meta["B"])
        members = [Network.load(d / f"member_{i}") for i in range(B)]
        vocab = Vocabulary.load(d / meta["vocabulary"])
        config = EnsembleConfig(base=replace(members[0].config, seed=0), num_bags=B,
                                master_seed=int(meta["master_seed"]))
        return cls(members, config), vocab


def is_ensemble_dir(path) -> bool:
    return (Path(path) / MANIFEST_NAME).is_file()


def _train_member(i, X, y, val_X, val_y, config: EnsembleConfig):
    net_seed, sample_seed = member_seeds(config.master_seed, i)
    idx = bootstrap_indices(len(X), sample_seed)
    try:
        return train(X[idx], y[idx], val_X, val_y, replace(config.base, seed=net_seed))
    except Exception as exc:
        raise MemberTrainingError(i, exc) from exc


def train_ensemble(train_X, train_y, val_X, val_y, config: EnsembleConfig,
                   workers: Optional[int] = 1) -> tuple[Ensemble, list[TrainReport]]:
    """Train ``num_bags`` members, each on its own bootstrap resample of the training set.

    Members are independent, so ``workers > 1`` trains them on a thread pool;
    results are ordered by member index either way.
    """
    X = np.asarray(train_X, dtype=np.float64)
    y = np.asarray(train_y, dtype=np.int64)
    if len(X) == 0:
        raise ValueError("empty training set")
    indices = range(config.num_bags)
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _train_member(i, X, y, val_X, val_y, config), indices))
    else:
        results = [_train_member(i, X, y, val_X, val_y, config) for i in indices]
    members = [net for net, _ in results]
    return Ensemble(members, config), [rep for _, rep in results]


def member_probs(ensemble: Ensemble, X) -> np.ndarray:
    """Stacked member probabilities, shape (B, n, 3) for a batch or (B, 3) for one vector."""
    return np.stack([predict_proba(m, X) for m in ensemble.members])


def vote(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Plurality vote over member probability vectors of shape (B, n, 3).

    Returns (winning label indices (n,), vote counts (n, 3)). Ties between
    top vote-getters are settled by summed member probability over the tied
    labels, then by lowest label index.
    """
    B, n, _ = probs.shape
    ballots = np.argmax(probs, axis=2)
    counts = np.zeros((n, NUM_CLASSES), dtype=np.int64)
    for b in range(B):
        counts[np.arange(n), ballots[b]] += 1
    tied = counts == counts.max(axis=1, keepdims=True)
    mass = np.where(tied, probs.sum(axis=0), -np.inf)
    return np.argmax(mass, axis=1), counts


def predict_vote(ensemble: Ensemble, x) -> tuple[Label, np.ndarray]:
    probs = member_probs(ensemble, x)
    if probs.ndim != 2:
        raise DimensionError("predict_vote takes a single feature vector; use predict_vote_batch")
    winners, counts = vote(probs[:, None, :])
    return Label(int(winners[0])), counts[0]


def predict_vote_batch(ensemble: Ensemble, X) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError("expected a 2-D batch of feature vectors")
    if len(X) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, NUM_CLASSES), dtype=np.int64)
    return vote(member_probs(ensemble, X))


def ensemble_accuracy(ensemble: Ensemble, X, y) -> float:
    labels, _ = predict_vote_batch(ensemble, X)
    return float(np.mean(labels == np.asarray(y)))
