"""
Positive-Class Metrics

Precision, recall and F1 of the positive (health mention) class. Every ratio
with a zero denominator is defined as 0.
"""

from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from src.domain.posts import Label


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator else 0.0


@dataclass(frozen=True)
class Metrics:
    """Confusion counts of the positive class and the ratios derived from them."""
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return _ratio(2 * p * r, p + r)

    def __add__(self, other: "Metrics") -> "Metrics":
        return Metrics(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)

    def to_dict(self) -> dict:
        return {**asdict(self), "precision": self.precision, "recall": self.recall, "f1": self.f1}


def _is_positive(label) -> bool:
    return Label.parse(label).is_positive


def positive_class_metrics(predictions: Sequence, gold: Sequence) -> Metrics:
    """
    Confusion counts of the positive class.

    Args:
        predictions: Predicted labels (Label, "pos"/"neg", 0/1 or bool)
        gold: Gold labels in the same encoding options

    Raises:
        ValueError: the sequences differ in length
    """
    if len(predictions) != len(gold):
        raise ValueError(f"{len(predictions)} predictions but {len(gold)} gold labels")
    tp = fp = fn = tn = 0
    for predicted, actual in zip(predictions, gold):
        p, g = _is_positive(predicted), _is_positive(actual)
        if p and g:
            tp += 1
        elif p:
            fp += 1
        elif g:
            fn += 1
        else:
            tn += 1
    return Metrics(tp, fp, fn, tn)


def pooled(metrics: Iterable[Metrics]) -> Metrics:
    """Metrics of the summed confusion counts."""
    return sum(metrics, Metrics(0, 0, 0, 0))
