"""Bootstrap-aggregated tree ensemble with per-split feature subsampling.

Every tree draws its bootstrap sample and its per-node feature subsets from
an RNG substream spawned from (seed, tree index), so a fitted forest is a
pure function of (seed, data, params) no matter how tree fitting is
scheduled. Prediction averages the per-tree leaf distributions; feature
importance is mean decrease in impurity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Union

import numpy as np

from .cart import DecisionTree, N_CLASSES, TreeParams, fit_tree, predict_matrix
from .errors import InputError
from .features import FeatureMatrix

FOREST_DEPTH_CAP = 32


def _default_tree_params() -> TreeParams:
    return TreeParams(max_depth=FOREST_DEPTH_CAP)


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    tree_params: TreeParams = dataclass_field(default_factory=_default_tree_params)
    features_per_split: Union[str, int] = "sqrt"
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise InputError("n_trees must be >= 1")
        if isinstance(self.features_per_split, str):
            if self.features_per_split not in ("sqrt", "all"):
                raise InputError("features_per_split must be 'sqrt', 'all', or a positive integer")
        elif self.features_per_split < 1:
            raise InputError("features_per_split must be >= 1")

    def resolve_features_per_split(self, n_features: int) -> int:
        if self.features_per_split == "sqrt":
            return min(n_features, math.ceil(math.sqrt(n_features)))
        if self.features_per_split == "all":
            return n_features
        return min(n_features, int(self.features_per_split))


@dataclass
class Forest:
    trees: list[DecisionTree]
    params: ForestParams
    oob_masks: list[np.ndarray]  # per tree: row indices never drawn by its bootstrap
    importances: dict[str, float]
    feature_names: tuple[str, ...]
    schema_fingerprint: str = ""

    def to_dict(self) -> dict:
        return {
            "params": {
                "n_trees": self.params.n_trees,
                "tree_params": {
                    "max_depth": self.params.tree_params.max_depth,
                    "min_samples_split": self.params.tree_params.min_samples_split,
                    "min_impurity_decrease": self.params.tree_params.min_impurity_decrease,
                },
                "features_per_split": self.params.features_per_split,
                "bootstrap": self.params.bootstrap,
                "seed": self.params.seed,
            },
            "feature_names": list(self.feature_names),
            "schema_fingerprint": self.schema_fingerprint,
            "importances": {name: self.importances[name] for name in self.feature_names},
            "oob_masks": [mask.tolist() for mask in self.oob_masks],
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Forest":
        try:
            p = data["params"]
            params = ForestParams(
                n_trees=int(p["n_trees"]),
                tree_params=TreeParams(**p["tree_params"]),
                features_per_split=p["features_per_split"],
                bootstrap=bool(p["bootstrap"]),
                seed=int(p["seed"]),
            )
            trees = [DecisionTree.from_dict(t) for t in data["trees"]]
            feature_names = tuple(data["feature_names"])
            importances = {str(k): float(v) for k, v in data["importances"].items()}
            oob = [np.array(m, dtype=np.int64) for m in data["oob_masks"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed forest document: {exc}") from None
        return cls(
            trees=trees,
            params=params,
            oob_masks=oob,
            importances=importances,
            feature_names=feature_names,
            schema_fingerprint=data.get("schema_fingerprint", ""),
        )


def _tree_importance(tree: DecisionTree, n_total: int, n_features: int) -> np.ndarray:
    imp = np.zeros(n_features, dtype=np.float64)
    internal = tree.left >= 0
    for node in np.nonzero(internal)[0]:
        weight = tree.counts[node].sum() / n_total
        imp[tree.feature[node]] += weight * tree.decrease[node]
    return imp


def fit_forest(train: FeatureMatrix, params: ForestParams) -> Forest:
    """Fit n_trees trees on bootstrap samples with feature subsampling."""
    if train.labels is None:
        raise InputError("training matrix has no labels")
    if train.rows == 0:
        raise InputError("training matrix is empty")
    n, n_features = train.values.shape
    k = params.resolve_features_per_split(n_features)
    streams = np.random.SeedSequence(params.seed).spawn(params.n_trees)
    all_rows = np.arange(n, dtype=np.int64)

    trees: list[DecisionTree] = []
    oob_masks: list[np.ndarray] = []
    total_importance = np.zeros(n_features, dtype=np.float64)
    for t in range(params.n_trees):
        rng = np.random.default_rng(streams[t])
        if params.bootstrap:
            sample = rng.integers(0, n, size=n)
            oob = np.setdiff1d(all_rows, np.unique(sample))
        else:
            sample = all_rows
            oob = np.array([], dtype=np.int64)
        sampler = None
        if k < n_features:
            sampler = lambda rng=rng: rng.choice(n_features, size=k, replace=False)
        subset = FeatureMatrix(
            values=train.values[sample],
            schema=train.schema,
            labels=train.labels[sample],
        )
        tree = fit_tree(subset, params.tree_params, sampler)
        trees.append(tree)
        oob_masks.append(oob)
        total_importance += _tree_importance(tree, n, n_features)

    mean_importance = total_importance / params.n_trees
    total = mean_importance.sum()
    if total > 0:
        mean_importance = mean_importance / total
    importances = {
        name: float(mean_importance[i]) for i, name in enumerate(train.schema.feature_names)
    }
    return Forest(
        trees=trees,
        params=params,
        oob_masks=oob_masks,
        importances=importances,
        feature_names=train.schema.feature_names,
        schema_fingerprint=train.schema.fingerprint(),
    )


def predict_proba(forest: Forest, x: np.ndarray) -> np.ndarray:
    """Mean of the per-tree leaf distributions for one encoded record."""
    x = np.asarray(x, dtype=np.float64)
    return predict_proba_matrix(forest, x.reshape(1, -1))[0]


def predict_proba_matrix(forest: Forest, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != forest.trees[0].n_features:
        raise InputError(
            f"matrix has {X.shape[1]} features, forest expects {forest.trees[0].n_features}"
        )
    acc = np.zeros((X.shape[0], N_CLASSES), dtype=np.float64)
    for tree in forest.trees:
        acc += predict_matrix(tree, X)
    return acc / len(forest.trees)


def feature_importance(forest: Forest) -> dict[str, float]:
    """Mean-decrease-in-impurity importance per feature name."""
    return dict(forest.importances)
