"""End-user recommendation function and versioned model persistence.

A trained model bundles the feature schema, the forest used for
predictions, the shallow interpretable tree, and reproducibility metadata
in one JSON document. Loading verifies the format version and that both
classifiers were fitted under the embedded schema.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .cart import DecisionTree, TreeParams, fit_tree
from .domain import Dataset, STRATEGIES, SystemRecord, require_valid
from .errors import InputError, ModelLoadError
from .features import FeatureSchema, build_schema, encode, encode_dataset, stratified_split
from .forest import Forest, ForestParams, fit_forest, predict_proba

FORMAT_VERSION = 1


def _creation_timestamp() -> str:
    """UTC ISO timestamp; honors SOURCE_DATE_EPOCH so artifacts reproduce.

    Without the env var the epoch itself is used: identical inputs must
    yield byte-identical model documents, so wall-clock time stays out.
    """
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class TrainedModel:
    schema: FeatureSchema
    forest: Forest
    interpretable_tree: DecisionTree
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "schema": self.schema.to_dict(),
            "schema_fingerprint": self.schema.fingerprint(),
            "forest": self.forest.to_dict(),
            "interpretable_tree": self.interpretable_tree.to_dict(),
            "metadata": self.metadata,
        }


@dataclass(frozen=True)
class Recommendation:
    strategy: str
    confidence: float
    alternatives: tuple[tuple[str, float], ...]  # ranks 2..4 by probability

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "confidence": self.confidence,
            "alternatives": [
                {"strategy": name, "probability": p} for name, p in self.alternatives
            ],
        }


def train_model(
    dataset: Dataset,
    tree_params: TreeParams = TreeParams(),
    forest_params: ForestParams = ForestParams(),
    test_fraction: float = 0.3,
    seed: int = 0,
    generator_seed: Optional[int] = None,
    cv_summary: Optional[dict] = None,
) -> tuple[TrainedModel, Dataset, Dataset]:
    """Split, fit both classifiers on the training part, and assemble a model.

    Returns the model plus the (train, test) datasets so callers can
    evaluate on the exact holdout. The split is reproducible from the
    recorded seed and fraction.
    """
    train, test = stratified_split(dataset, test_fraction, seed)
    schema = build_schema(train)
    matrix = encode_dataset(train, schema)
    forest = fit_forest(matrix, forest_params)
    tree = fit_tree(matrix, tree_params)
    metadata = {
        "created_at": _creation_timestamp(),
        "generator_seed": generator_seed,
        "split_seed": seed,
        "test_fraction": test_fraction,
        "tree_params": {
            "max_depth": tree_params.max_depth,
            "min_samples_split": tree_params.min_samples_split,
            "min_impurity_decrease": tree_params.min_impurity_decrease,
        },
        "forest_params": {
            "n_trees": forest_params.n_trees,
            "max_depth": forest_params.tree_params.max_depth,
            "features_per_split": forest_params.features_per_split,
            "bootstrap": forest_params.bootstrap,
            "seed": forest_params.seed,
        },
        "cv": cv_summary,
    }
    return TrainedModel(schema=schema, forest=forest, interpretable_tree=tree, metadata=metadata), train, test


def recommend(model: TrainedModel, record: SystemRecord) -> Recommendation:
    """Validate, encode, and rank strategies for one system description.

    Probability ties break toward the less disruptive strategy (lower
    urgency index).
    """
    require_valid(record)
    x = encode(record, model.schema)
    proba = predict_proba(model.forest, x)
    # sort by probability descending, urgency ascending on ties
    order = sorted(range(len(STRATEGIES)), key=lambda i: (-proba[i], i))
    top = order[0]
    alternatives = tuple((STRATEGIES[i], float(proba[i])) for i in order[1:4])
    return Recommendation(
        strategy=STRATEGIES[top],
        confidence=float(proba[top]),
        alternatives=alternatives,
    )


def save_model(model: TrainedModel, destination: str | Path) -> None:
    with open(destination, "w", encoding="utf-8") as handle:
        json.dump(model.to_dict(), handle)
        handle.write("\n")


def load_model(source: str | Path) -> TrainedModel:
    try:
        with open(source, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelLoadError(f"cannot read model document: {exc}") from None
    return model_from_dict(doc)


def model_from_dict(doc: dict) -> TrainedModel:
    if not isinstance(doc, dict):
        raise ModelLoadError("model document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelLoadError(f"unsupported model format version {version!r}")
    try:
        schema = FeatureSchema.from_dict(doc["schema"])
        forest = Forest.from_dict(doc["forest"])
        tree = DecisionTree.from_dict(doc["interpretable_tree"])
        metadata = doc.get("metadata", {})
    except (KeyError, TypeError, InputError) as exc:
        raise ModelLoadError(f"malformed model document: {exc}") from None
    fingerprint = schema.fingerprint()
    if doc.get("schema_fingerprint") != fingerprint:
        raise ModelLoadError("schema fingerprint mismatch in model document")
    if forest.schema_fingerprint != fingerprint or tree.schema_fingerprint != fingerprint:
        raise ModelLoadError("classifier was not fitted under the embedded schema")
    return TrainedModel(schema=schema, forest=forest, interpretable_tree=tree, metadata=metadata)
