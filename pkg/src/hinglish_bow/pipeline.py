"""Run configuration and the end-to-end train / bag / sweep pipelines."""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Optional, Sequence

import numpy as np

from .corpus import CorpusError, ProcessedTweet, load_corpus
from .ensemble import Ensemble, EnsembleConfig, ensemble_accuracy, train_ensemble
from .features import (
    FeatureMode,
    VocabConfig,
    Vocabulary,
    build_vocabulary,
    english_stopwords,
    load_stopwords,
    vectorize_corpus,
)
from .network import Network, NetworkConfig, TrainReport, accuracy, train


class ConfigError(ValueError):
    pass


class SweepCellError(RuntimeError):
    def __init__(self, key: str, value, cause: BaseException):
        self.key, self.value = key, value
        super().__init__(f"sweep cell {key}={value}: {cause}")


SWEEP_AXES = {"K": "K", "N": "N", "mode": "mode", "M": "num_layers", "num_layers": "num_layers",
              "H": "hidden_size", "hidden_size": "hidden_size"}


@dataclass
class RunConfig:
    # paths
    train: Optional[str] = None
    val: Optional[str] = None
    output: Optional[str] = None
    stopwords: str = "english"  # "english", "none", or a file with one word per line
    # features
    K: int = 15
    N: int = 1
    case_fold: bool = True
    mode: str = "binary"
    # network
    num_layers: int = 2
    hidden_size: int = 300
    seed: int = 0
    learning_rate: float = 1e-3
    epochs: int = 30
    batch_size: int = 32
    optimizer: str = "adam"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    l2_weight_decay: float = 0.0
    # bagging
    num_bags: int = 10
    master_seed: int = 0
    # execution
    workers: int = 1
    # sweeps
    axis: Optional[str] = None
    values: Optional[str] = None

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_strings(cls, raw: dict[str, str], base: Optional["RunConfig"] = None) -> "RunConfig":
        types = {f.name: f.type for f in fields(cls)}
        updates = {}
        for key, text in raw.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kind = types[key]
            try:
                if kind == "int":
                    updates[key] = int(text)
                elif kind == "float":
                    updates[key] = float(text)
                elif kind == "bool":
                    lowered = text.strip().lower()
                    if lowered not in ("1", "0", "true", "false", "yes", "no"):
                        raise ValueError(text)
                    updates[key] = lowered in ("1", "true", "yes")
                else:
                    updates[key] = text
            except ValueError:
                raise ConfigError(f"bad value for {key}: {text!r}") from None
        return replace(base or cls(), **updates)

    def vocab_config(self) -> VocabConfig:
        if self.stopwords == "english":
            stop = english_stopwords()
        elif self.stopwords == "none":
            stop = frozenset()
        else:
            stop = load_stopwords(self.stopwords)
        try:
            return VocabConfig(K=self.K, N=self.N, stopwords=stop, case_fold=self.case_fold)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def feature_mode(self) -> FeatureMode:
        try:
            return FeatureMode.parse(self.mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def network_config(self, input_dim: int) -> NetworkConfig:
        names = {f.name for f in fields(NetworkConfig)} - {"input_dim", "output_dim"}
        try:
            return NetworkConfig(input_dim=input_dim, **{n: getattr(self, n) for n in names})
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def validate_paths(self, *required: str) -> None:
        for key in required:
            value = getattr(self, key)
            if not value:
                raise ConfigError(f"missing required setting {key!r}")
            if key != "output" and not os.path.exists(value):
                raise ConfigError(f"{key}: no such file: {value}")
        if self.stopwords not in ("english", "none") and not os.path.exists(self.stopwords):
            raise ConfigError(f"stopwords: no such file: {self.stopwords}")


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key=value`` lines; blank lines and lines starting with ``#`` are ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        out[key.strip()] = value.strip()
    return out


def load_labeled(path) -> list[ProcessedTweet]:
    corpus = load_corpus(path)
    unlabeled = [t.id for t in corpus if t.label is None]
    if unlabeled:
        raise CorpusError(f"{path}: {len(unlabeled)} tweets have no label (first id {unlabeled[0]})")
    return corpus


def labels_of(corpus: Sequence[ProcessedTweet]) -> np.ndarray:
    return np.array([int(t.label) for t in corpus], dtype=np.int64)


@dataclass
class TrainedModel:
    network: Network
    vocab: Vocabulary
    report: TrainReport
    mode: FeatureMode

    @property
    def val_accuracy(self) -> float:
        return self.report.val_accuracy[self.report.best_epoch]


def train_model(cfg: RunConfig, train_corpus: Sequence[ProcessedTweet],
                val_corpus: Sequence[ProcessedTweet]) -> TrainedModel:
    """Vocabulary from the training split only, then vectorize and train."""
    vocab = build_vocabulary(train_corpus, cfg.vocab_config())
    mode = cfg.feature_mode()
    X = vectorize_corpus(train_corpus, vocab, mode)
    VX = vectorize_corpus(val_corpus, vocab, mode)
    net, report = train(X, labels_of(train_corpus), VX, labels_of(val_corpus), cfg.network_config(len(vocab)))
    return TrainedModel(net, vocab, report, mode)


@dataclass
class BaggedModel:
    ensemble: Ensemble
    vocab: Vocabulary
    reports: list[TrainReport]
    member_accuracy: list[float]
    accuracy: float


def train_bagged(cfg: RunConfig, train_corpus: Sequence[ProcessedTweet],
                 val_corpus: Sequence[ProcessedTweet]) -> BaggedModel:
    vocab = build_vocabulary(train_corpus, cfg.vocab_config())
    mode = cfg.feature_mode()
    X = vectorize_corpus(train_corpus, vocab, mode)
    VX = vectorize_corpus(val_corpus, vocab, mode)
    vy = labels_of(val_corpus)
    try:
        ens_cfg = EnsembleConfig(base=cfg.network_config(len(vocab)), num_bags=cfg.num_bags,
                                 master_seed=cfg.master_seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ensemble, reports = train_ensemble(X, labels_of(train_corpus), VX, vy, ens_cfg, workers=cfg.workers)
    if len(VX):
        member_acc = [accuracy(m, VX, vy) for m in ensemble.members]
        ens_acc = ensemble_accuracy(ensemble, VX, vy)
    else:
        member_acc, ens_acc = [float("nan")] * len(ensemble.members), float("nan")
    return BaggedModel(ensemble, vocab, reports, member_acc, ens_acc)


def sweep_values(axis: str, values: str) -> tuple[str, list]:
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from K, N, M, H, mode")
    key = SWEEP_AXES[axis]
    items = [v.strip() for v in values.split(",") if v.strip()]
    if not items:
        raise ConfigError("sweep needs at least one value")
    if key == "mode":
        return key, items
    try:
        return key, [int(v) for v in items]
    except ValueError:
        raise ConfigError(f"sweep values for {axis} must be integers: {values!r}") from None


@dataclass
class SweepCell:
    key: str
    value: object
    val_accuracy: float
    best_epoch: int
    vocab_size: int


def run_sweep(cfg: RunConfig, axis: str, values: str, train_corpus, val_corpus) -> list[SweepCell]:
    """One fresh training run per value on the chosen axis, same seed for every cell."""
    key, cells = sweep_values(axis, values)

    def run(value):
        cell_cfg = dataclasses.replace(cfg, **{key: value})
        try:
            model = train_model(cell_cfg, train_corpus, val_corpus)
        except Exception as exc:
            raise SweepCellError(key, value, exc) from exc
        return SweepCell(key, value, model.val_accuracy, model.report.best_epoch, len(model.vocab))

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(run, cells))
    return [run(v) for v in cells]


def format_sweep(cells: Sequence[SweepCell]) -> str:
    key = cells[0].key
    width = max(len(key), 12)
    lines = [f"{key:<{width}} {'|V|':>8} {'accuracy':>9}", "-" * (width + 19)]
    for c in cells:
        lines.append(f"{str(c.value):<{width}} {c.vocab_size:>8d} {100 * c.val_accuracy:>8.1f}%")
    return "\n".join(lines) + "\n"


def sweep_rows(cells: Sequence[SweepCell]) -> str:
    rows = [f"{cells[0].key}\tvocab_size\tbest_epoch\tval_accuracy"]
    rows += [f"{c.value}\t{c.vocab_size}\t{c.best_epoch}\t{c.val_accuracy:.6f}" for c in cells]
    return "\n".join(rows) + "\n"
