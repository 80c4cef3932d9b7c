"""Confusion matrix, accuracy and per-class / averaged precision, recall and F1."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Label

LABELS = tuple(Label)


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # counts[gold, pred]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion(golds: Sequence, preds: Sequence) -> ConfusionMatrix:
    if len(golds) != len(preds):
        raise ValueError(f"length mismatch: {len(golds)} gold labels vs {len(preds)} predictions")
    if len(golds) == 0:
        raise ValueError("nothing to score")
    counts = np.zeros((3, 3), dtype=np.int64)
    np.add.at(counts, (np.asarray(golds, dtype=np.int64), np.asarray(preds, dtype=np.int64)), 1)
    return ConfusionMatrix(counts)


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: tuple[ClassScores, ClassScores, ClassScores]
    macro_f1: float
    weighted_f1: float
    support: tuple[int, int, int]
    confusion: ConfusionMatrix

    def key_values(self) -> dict[str, float]:
        out = {"accuracy": self.accuracy, "macro_f1": self.macro_f1, "weighted_f1": self.weighted_f1}
        for label, s in zip(LABELS, self.per_class):
            out[f"precision_{label.text}"] = s.precision
            out[f"recall_{label.text}"] = s.recall
            out[f"f1_{label.text}"] = s.f1
        for label, n in zip(LABELS, self.support):
            out[f"support_{label.text}"] = n
        return out

    def to_key_value(self) -> str:
        lines = []
        for key, value in self.key_values().items():
            lines.append(f"{key}={value}" if key.startswith("support_") else f"{key}={value:.6f}")
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        rows = [f"{'class':<10}{'precision':>11}{'recall':>9}{'f1':>9}{'support':>9}"]
        for label, s, n in zip(LABELS, self.per_class, self.support):
            rows.append(f"{label.text:<10}{s.precision:>11.4f}{s.recall:>9.4f}{s.f1:>9.4f}{n:>9d}")
        total = sum(self.support)
        rows.append(f"{'macro':<10}{'':>11}{'':>9}{self.macro_f1:>9.4f}{total:>9d}")
        rows.append(f"{'weighted':<10}{'':>11}{'':>9}{self.weighted_f1:>9.4f}{total:>9d}")
        rows.append(f"accuracy {self.accuracy:.4f}")
        rows.append("")
        rows.append("confusion (rows gold, columns predicted)")
        rows.append(" " * 10 + "".join(f"{label.text:>10}" for label in LABELS))
        for label, row in zip(LABELS, self.confusion.counts):
            rows.append(f"{label.text:<10}" + "".join(f"{int(c):>10d}" for c in row))
        return "\n".join(rows) + "\n"


def report(cm: ConfusionMatrix) -> MetricsReport:
    counts = np.asarray(cm.counts)
    total = int(counts.sum())
    if total <= 0:
        raise ValueError("empty confusion matrix")
    scores = []
    for c in range(3):
        tp = int(counts[c, c])
        fp = int(counts[:, c].sum()) - tp
        fn = int(counts[c, :].sum()) - tp
        p = _ratio(tp, tp + fp)
        r = _ratio(tp, tp + fn)
        scores.append(ClassScores(p, r, _ratio(2 * p * r, p + r)))
    support = tuple(int(s) for s in counts.sum(axis=1))
    return MetricsReport(
        accuracy=int(np.trace(counts)) / total,
        per_class=tuple(scores),
        macro_f1=sum(s.f1 for s in scores) / 3,
        weighted_f1=sum(n * s.f1 for n, s in zip(support, scores)) / total,
        support=support,
        confusion=ConfusionMatrix(counts.copy()),
    )


def evaluate(golds: Sequence, preds: Sequence) -> MetricsReport:
    return report(confusion(golds, preds))
