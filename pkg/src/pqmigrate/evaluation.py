"""Classification metrics, cross-validation, and the dataset analysis tables.

Strategy order everywhere is urgency ascending. Heatmaps are computed on
dataset labels (ground truth), matching how the corpus itself is analyzed;
model quality is measured separately through reports and cross-validation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .cart import TreeParams, fit_tree, predict_matrix
from .domain import CRYPTO_METHODS, Dataset, STRATEGIES
from .errors import InputError
from .features import build_schema, encode_dataset, kfold
from .forest import ForestParams, fit_forest, predict_proba_matrix
from .risk import urgency_index

# a model spec is either params for a built-in learner or a custom trainer
# returning predicted class indices (or names) for the test set
ModelParams = Union[TreeParams, ForestParams, Callable[[Dataset, Dataset], Sequence]]


@dataclass(frozen=True)
class ClassReport:
    """Per-strategy precision/recall/F1 plus accuracy and macro averages."""

    per_class: dict
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "per_class": self.per_class,
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
        }

    def to_text(self) -> str:
        lines = [f"{'':24s} {'precision':>9s} {'recall':>9s} {'f1':>9s} {'support':>9s}"]
        for name in STRATEGIES:
            m = self.per_class[name]
            lines.append(
                f"{name:24s} {m['precision']:9.3f} {m['recall']:9.3f} "
                f"{m['f1']:9.3f} {m['support']:9d}"
            )
        lines.append("")
        lines.append(f"{'accuracy':24s} {self.accuracy:9.3f}")
        lines.append(
            f"{'macro avg':24s} {self.macro_precision:9.3f} "
            f"{self.macro_recall:9.3f} {self.macro_f1:9.3f}"
        )
        return "\n".join(lines)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts[true][predicted] in urgency-ascending strategy order."""

    counts: np.ndarray
    labels: tuple[str, ...] = STRATEGIES

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.counts.sum())

    def most_confused_pair(self) -> tuple[str, str]:
        """Unordered class pair with the largest summed off-diagonal mass."""
        best, best_count = (0, 1), -1
        n = len(self.labels)
        for a in range(n):
            for b in range(a + 1, n):
                c = int(self.counts[a, b] + self.counts[b, a])
                if c > best_count:
                    best, best_count = (a, b), c
        return self.labels[best[0]], self.labels[best[1]]

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "counts": self.counts.tolist()}

    def to_text(self) -> str:
        width = max(len(s) for s in self.labels) + 2
        header = " " * width + "".join(f"{s[:10]:>11s}" for s in self.labels)
        lines = [header]
        for i, s in enumerate(self.labels):
            lines.append(f"{s:<{width}s}" + "".join(f"{int(c):11d}" for c in self.counts[i]))
        return "\n".join(lines)


@dataclass(frozen=True)
class CvScore:
    fold_accuracies: tuple[float, ...]
    mean: float
    std: float  # population standard deviation over folds

    def to_dict(self) -> dict:
        return {"fold_accuracies": list(self.fold_accuracies), "mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class HeatmapTable:
    """Row-labeled table; kind 'percent' rows sum to 100, 'score' rows are stats."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    values: np.ndarray
    kind: str  # "percent" | "score"

    def row(self, label: str) -> dict:
        i = self.row_labels.index(label)
        return {c: float(self.values[i, j]) for j, c in enumerate(self.col_labels)}

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "values": self.values.tolist(),
        }

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.col_labels)]
        for i, r in enumerate(self.row_labels):
            lines.append(r + "," + ",".join(repr(float(v)) for v in self.values[i]))
        return "\n".join(lines) + "\n"


def _as_indices(values: Sequence) -> np.ndarray:
    index = {name: i for i, name in enumerate(STRATEGIES)}
    out = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        if isinstance(v, str):
            if v not in index:
                raise InputError(f"unknown strategy {v!r}")
            out[i] = index[v]
        else:
            out[i] = int(v)
            if not (0 <= out[i] < len(STRATEGIES)):
                raise InputError(f"class index {v} out of range")
    return out


def classification_report(predictions: Sequence, truths: Sequence) -> ClassReport:
    """Standard per-class metrics with the 0-for-empty-denominator convention."""
    if len(predictions) == 0 or len(predictions) != len(truths):
        raise InputError("predictions and truths must be equal-length and nonempty")
    pred = _as_indices(predictions)
    true = _as_indices(truths)
    per_class = {}
    f1s, precisions, recalls = [], [], []
    for i, name in enumerate(STRATEGIES):
        tp = int(((pred == i) & (true == i)).sum())
        fp = int(((pred == i) & (true != i)).sum())
        fn = int(((pred != i) & (true == i)).sum())
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[name] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": int((true == i).sum()),
        }
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
    return ClassReport(
        per_class=per_class,
        accuracy=float((pred == true).mean()),
        macro_precision=float(np.mean(precisions)),
        macro_recall=float(np.mean(recalls)),
        macro_f1=float(np.mean(f1s)),
    )


def confusion_matrix(predictions: Sequence, truths: Sequence) -> ConfusionMatrix:
    if len(predictions) == 0 or len(predictions) != len(truths):
        raise InputError("predictions and truths must be equal-length and nonempty")
    pred = _as_indices(predictions)
    true = _as_indices(truths)
    counts = np.zeros((len(STRATEGIES), len(STRATEGIES)), dtype=np.int64)
    np.add.at(counts, (true, pred), 1)
    return ConfusionMatrix(counts=counts)


def fit_and_score(train: Dataset, test: Dataset, params: ModelParams) -> float:
    """Train a fresh model on train (schema included) and return test accuracy."""
    if callable(params) and not isinstance(params, (TreeParams, ForestParams)):
        pred = _as_indices(list(params(train, test)))
        true = _as_indices([r.recommended_strategy for r in test])
        return float((pred == true).mean())
    schema = build_schema(train)
    mtrain = encode_dataset(train, schema)
    mtest = encode_dataset(test, schema)
    if isinstance(params, ForestParams):
        model = fit_forest(mtrain, params)
        pred = predict_proba_matrix(model, mtest.values).argmax(axis=1)
    else:
        model = fit_tree(mtrain, params)
        pred = predict_matrix(model, mtest.values).argmax(axis=1)
    return float((pred == mtest.labels).mean())


def cross_validate(dataset: Dataset, params: ModelParams, k: int, seed: int) -> CvScore:
    """k-fold accuracy of a fresh model per fold; schema rebuilt on each fold."""
    accuracies = []
    for train_idx, val_idx in kfold(dataset, k, seed):
        assert len(np.intersect1d(train_idx, val_idx)) == 0
        accuracies.append(fit_and_score(dataset.subset(train_idx), dataset.subset(val_idx), params))
    return CvScore(
        fold_accuracies=tuple(accuracies),
        mean=float(np.mean(accuracies)),
        std=float(np.std(accuracies)),
    )


def method_strategy_heatmap(dataset: Dataset) -> HeatmapTable:
    """Per crypto method, the percentage distribution of its labels."""
    if len(dataset) == 0:
        raise InputError("cannot analyze an empty dataset")
    class_index = {name: i for i, name in enumerate(STRATEGIES)}
    observed = [m for m in CRYPTO_METHODS if any(r.crypto_method == m for r in dataset)]
    values = np.zeros((len(observed), len(STRATEGIES)), dtype=np.float64)
    for i, method in enumerate(observed):
        rows = [r for r in dataset if r.crypto_method == method]
        for r in rows:
            if r.recommended_strategy is None:
                raise InputError("dataset contains unlabeled records")
            values[i, class_index[r.recommended_strategy]] += 1
        values[i] = values[i] / len(rows) * 100.0
    return HeatmapTable(
        row_labels=tuple(observed),
        col_labels=STRATEGIES,
        values=values,
        kind="percent",
    )


def system_vulnerability_scores(dataset: Dataset) -> HeatmapTable:
    """Mean and population std of the urgency index per system type."""
    if len(dataset) == 0:
        raise InputError("cannot analyze an empty dataset")
    by_type: dict[str, list[int]] = {}
    for r in dataset:
        if r.recommended_strategy is None:
            raise InputError("dataset contains unlabeled records")
        by_type.setdefault(r.system_type, []).append(urgency_index(r.recommended_strategy))
    # rank most urgent first for readable report output
    rows = sorted(by_type.items(), key=lambda kv: -float(np.mean(kv[1])))
    values = np.array(
        [[float(np.mean(v)), float(np.std(v))] for _, v in rows], dtype=np.float64
    )
    return HeatmapTable(
        row_labels=tuple(t for t, _ in rows),
        col_labels=("mean_urgency", "std_urgency"),
        values=values,
        kind="score",
    )
