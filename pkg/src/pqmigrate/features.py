"""Record encoding (one-hot + min-max) and stratified partition utilities.

The feature layout is: one one-hot block per categorical field
(system_type, then crypto_method), followed by the five numeric fields
scaled to [0,1] with train-set minima/maxima. Schemas are fit on training
data only and travel with persisted models.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domain import Dataset, STRATEGIES, SystemRecord
from .errors import EncodingError, InputError

CATEGORICAL_FIELDS = ("system_type", "crypto_method")
NUMERIC_FIELDS = (
    "security_lifetime",
    "key_size",
    "system_complexity",
    "integration_complexity",
    "data_sensitivity",
)

_CLASS_INDEX = {name: i for i, name in enumerate(STRATEGIES)}


@dataclass(frozen=True)
class FeatureSchema:
    """Encoding layout fitted from a dataset."""

    categorical_specs: tuple[tuple[str, tuple[str, ...]], ...]
    numeric_specs: tuple[tuple[str, float, float], ...]
    feature_names: tuple[str, ...]

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_categorical(self) -> int:
        return sum(len(cats) for _, cats in self.categorical_specs)

    def fingerprint(self) -> str:
        payload = json.dumps(
            {
                "categorical": [[f, list(c)] for f, c in self.categorical_specs],
                "numeric": [[f, lo, hi] for f, lo, hi in self.numeric_specs],
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {
            "categorical_specs": [[f, list(c)] for f, c in self.categorical_specs],
            "numeric_specs": [[f, lo, hi] for f, lo, hi in self.numeric_specs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureSchema":
        categorical = tuple((f, tuple(c)) for f, c in data["categorical_specs"])
        numeric = tuple((f, float(lo), float(hi)) for f, lo, hi in data["numeric_specs"])
        return cls(
            categorical_specs=categorical,
            numeric_specs=numeric,
            feature_names=_feature_names(categorical, numeric),
        )


def _feature_names(categorical, numeric) -> tuple[str, ...]:
    names = []
    for field, cats in categorical:
        names.extend(f"{field}={c}" for c in cats)
    names.extend(field for field, _, _ in numeric)
    return tuple(names)


def build_schema(dataset: Dataset) -> FeatureSchema:
    """Observed categories (sorted) and numeric extrema of a nonempty dataset."""
    if len(dataset) == 0:
        raise InputError("cannot build a schema from an empty dataset")
    categorical = tuple(
        (field, tuple(sorted({getattr(r, field) for r in dataset})))
        for field in CATEGORICAL_FIELDS
    )
    numeric = tuple(
        (
            field,
            float(min(getattr(r, field) for r in dataset)),
            float(max(getattr(r, field) for r in dataset)),
        )
        for field in NUMERIC_FIELDS
    )
    return FeatureSchema(
        categorical_specs=categorical,
        numeric_specs=numeric,
        feature_names=_feature_names(categorical, numeric),
    )


def encode(record: SystemRecord, schema: FeatureSchema) -> np.ndarray:
    """Encode one record as a float vector under the schema.

    Unseen categorical values are an error rather than an all-zeros block;
    numeric fields use (x - min) / (max - min) with 0.5 for degenerate spans.
    """
    vector = np.zeros(schema.n_features, dtype=np.float64)
    offset = 0
    for field, cats in schema.categorical_specs:
        value = getattr(record, field)
        try:
            vector[offset + cats.index(value)] = 1.0
        except ValueError:
            raise EncodingError(
                f"{field} value {value!r} not in schema", field=field
            ) from None
        offset += len(cats)
    for field, lo, hi in schema.numeric_specs:
        x = float(getattr(record, field))
        vector[offset] = 0.5 if hi == lo else (x - lo) / (hi - lo)
        offset += 1
    return vector


@dataclass
class FeatureMatrix:
    """Encoded rows plus optional aligned class labels (indices into STRATEGIES)."""

    values: np.ndarray
    schema: FeatureSchema
    labels: Optional[np.ndarray] = None

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])

    def label_names(self) -> list[str]:
        if self.labels is None:
            raise InputError("matrix has no labels")
        return [STRATEGIES[i] for i in self.labels]


def encode_dataset(dataset: Dataset, schema: FeatureSchema) -> FeatureMatrix:
    values = np.empty((len(dataset), schema.n_features), dtype=np.float64)
    labels = np.empty(len(dataset), dtype=np.int64)
    labeled = True
    for i, record in enumerate(dataset):
        values[i] = encode(record, schema)
        if record.recommended_strategy is None:
            labeled = False
        else:
            labels[i] = _CLASS_INDEX[record.recommended_strategy]
    return FeatureMatrix(values=values, schema=schema, labels=labels if labeled else None)


def _round_half_down(x: float) -> int:
    return int(math.ceil(x - 0.5))


def _class_indices(dataset: Dataset) -> dict[str, list[int]]:
    by_class: dict[str, list[int]] = {}
    for i, record in enumerate(dataset):
        if record.recommended_strategy is None:
            raise InputError(f"record {i} is unlabeled")
        by_class.setdefault(record.recommended_strategy, []).append(i)
    # iterate classes in urgency order for reproducible RNG consumption
    return {name: by_class[name] for name in STRATEGIES if name in by_class}


def stratified_split(dataset: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Per-class split preserving proportions; same seed, same partition."""
    if not (0.0 < test_fraction < 1.0):
        raise InputError("test_fraction must lie strictly between 0 and 1")
    by_class = _class_indices(dataset)
    for name, idx in by_class.items():
        if len(idx) < 2:
            raise InputError(f"class {name!r} has fewer than 2 records")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    test_idx: list[int] = []
    train_idx: list[int] = []
    for name, idx in by_class.items():
        permuted = [idx[j] for j in rng.permutation(len(idx))]
        n_test = _round_half_down(len(idx) * test_fraction)
        test_idx.extend(permuted[:n_test])
        train_idx.extend(permuted[n_test:])
    return dataset.subset(sorted(train_idx)), dataset.subset(sorted(test_idx))


def kfold(dataset: Dataset, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified k-fold index pairs (train, validation) covering the dataset."""
    by_class = _class_indices(dataset)
    smallest = min(len(idx) for idx in by_class.values())
    if k < 2 or k > smallest:
        raise InputError(f"k must be in [2, {smallest}] for this dataset")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    folds: list[list[int]] = [[] for _ in range(k)]
    for ci, (name, idx) in enumerate(by_class.items()):
        permuted = [idx[j] for j in rng.permutation(len(idx))]
        base, rem = divmod(len(idx), k)
        # stagger remainders across folds so fold sizes stay balanced overall
        offset = ci % k
        start = 0
        for f in range(k):
            size = base + (1 if (f - offset) % k < rem else 0)
            folds[f].extend(permuted[start : start + size])
            start += size
    all_indices = np.arange(len(dataset))
    pairs = []
    for f in range(k):
        val = np.array(sorted(folds[f]), dtype=np.int64)
        train = np.setdiff1d(all_indices, val)
        pairs.append((train, val))
    return pairs
