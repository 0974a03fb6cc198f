"""Greedy binary classification tree with Gini impurity.

Split search is exhaustive over candidate features and midpoints between
consecutive distinct sorted values. Candidate splits are compared with
integer arithmetic (class counts are integers), so the chosen tree is a
deterministic function of its inputs down to the last tie-break: lowest
feature index first, then lowest threshold.

Routing convention: x[feature] <= threshold goes left.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .domain import STRATEGIES
from .errors import InputError
from .features import FeatureMatrix, FeatureSchema

N_CLASSES = len(STRATEGIES)

FeatureSampler = Callable[[], np.ndarray]


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 5
    min_samples_split: int = 2
    min_impurity_decrease: float = 0.0

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise InputError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise InputError("min_samples_split must be >= 2")
        if self.min_impurity_decrease < 0:
            raise InputError("min_impurity_decrease must be >= 0")


def gini(class_counts) -> float:
    """Gini impurity 1 - sum((c/n)^2) of a count vector."""
    counts = np.asarray(class_counts, dtype=np.int64)
    if counts.ndim != 1 or (counts < 0).any():
        raise InputError("class counts must be a vector of nonnegative integers")
    n = int(counts.sum())
    if n == 0:
        raise InputError("class counts must not all be zero")
    return 1.0 - float(((counts.astype(np.float64) / n) ** 2).sum())


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    candidate_features: np.ndarray,
    min_impurity_decrease: float = 0.0,
    n_classes: int = N_CLASSES,
) -> Optional[tuple[int, float, float]]:
    """Best (feature, threshold, impurity decrease) over the candidates, or None.

    Maximizing the weighted impurity decrease is equivalent to maximizing
    Q = S_L/n_L + S_R/n_R where S is the sum of squared class counts of a
    child; near-ties from the float search are resolved exactly with
    integer cross-multiplication.
    """
    n = len(y)
    if n < 2:
        return None
    feats = np.sort(np.asarray(candidate_features, dtype=np.int64))
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), y] = 1
    totals = onehot.sum(axis=0)
    s_parent = int((totals**2).sum())

    Xf = X[:, feats]
    order = np.argsort(Xf, axis=0, kind="stable")
    Xs = np.take_along_axis(Xf, order, axis=0)
    boundary = Xs[:-1] < Xs[1:]
    if not boundary.any():
        return None

    cums = onehot[order].cumsum(axis=0)[:-1]  # (n-1, F, C) left-side counts
    s_left = (cums**2).sum(axis=2)
    s_right = ((totals[None, None, :] - cums) ** 2).sum(axis=2)
    n_left = np.arange(1, n, dtype=np.int64)
    n_right = n - n_left
    numer = s_left * n_right[:, None] + s_right * n_left[:, None]
    denom = n_left * n_right  # depends on the boundary position only

    q = np.where(boundary, numer / denom[:, None], -np.inf)
    q_max = q.max()
    tol = 1e-9 * max(1.0, abs(q_max))
    rows, cols = np.nonzero(q >= q_max - tol)

    # exact winner among near-max candidates, lexicographic (feature, threshold)
    best = None
    for i, j in sorted(zip(rows.tolist(), cols.tolist()), key=lambda t: (t[1], t[0])):
        a, d = int(numer[i, j]), int(denom[i])
        if best is None or a * best[1] > best[0] * d:
            best = (a, d, i, j)
    a, d, i, j = best
    # accept only if the decrease strictly exceeds the configured minimum
    if min_impurity_decrease == 0.0:
        if a * n <= s_parent * d:
            return None
    decrease = (a / d - s_parent / n) / n
    if min_impurity_decrease > 0.0 and decrease <= min_impurity_decrease:
        return None
    threshold = float((Xs[i, j] + Xs[i + 1, j]) / 2.0)
    return int(feats[j]), threshold, float(decrease)


@dataclass
class DecisionTree:
    """Fitted tree stored as parallel node arrays (index -1 marks a leaf child)."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, n_classes) training-sample class counts
    decrease: np.ndarray  # impurity decrease of each internal node, 0 at leaves
    params: TreeParams
    n_features: int = 0
    schema_fingerprint: str = ""

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int((self.left < 0).sum())

    def depth(self) -> int:
        depths = {0: 0}
        best = 0
        for node in range(self.n_nodes):
            d = depths[node]
            if self.left[node] >= 0:
                depths[int(self.left[node])] = d + 1
                depths[int(self.right[node])] = d + 1
            else:
                best = max(best, d)
        return best

    def to_dict(self) -> dict:
        def walk(node: int) -> dict:
            if self.left[node] < 0:
                return {"counts": self.counts[node].tolist()}
            return {
                "feature": int(self.feature[node]),
                "threshold": float(self.threshold[node]),
                "decrease": float(self.decrease[node]),
                "left": walk(int(self.left[node])),
                "right": walk(int(self.right[node])),
            }

        return {
            "params": {
                "max_depth": self.params.max_depth,
                "min_samples_split": self.params.min_samples_split,
                "min_impurity_decrease": self.params.min_impurity_decrease,
            },
            "n_features": self.n_features,
            "schema_fingerprint": self.schema_fingerprint,
            "root": walk(0),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTree":
        feature: list[int] = []
        threshold: list[float] = []
        left: list[int] = []
        right: list[int] = []
        counts: list[list[int]] = []
        decrease: list[float] = []

        def walk(node: dict) -> int:
            idx = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            counts.append([0] * N_CLASSES)
            decrease.append(0.0)
            if "counts" in node:
                counts[idx] = [int(c) for c in node["counts"]]
                return idx
            feature[idx] = int(node["feature"])
            threshold[idx] = float(node["threshold"])
            decrease[idx] = float(node.get("decrease", 0.0))
            left[idx] = walk(node["left"])
            right[idx] = walk(node["right"])
            counts[idx] = (
                np.asarray(counts[left[idx]]) + np.asarray(counts[right[idx]])
            ).tolist()
            return idx

        try:
            params = TreeParams(**data["params"])
            walk(data["root"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed tree document: {exc}") from None
        return cls(
            feature=np.array(feature, dtype=np.int64),
            threshold=np.array(threshold, dtype=np.float64),
            left=np.array(left, dtype=np.int64),
            right=np.array(right, dtype=np.int64),
            counts=np.array(counts, dtype=np.int64),
            decrease=np.array(decrease, dtype=np.float64),
            params=params,
            n_features=int(data.get("n_features", 0)),
            schema_fingerprint=data.get("schema_fingerprint", ""),
        )


def fit_tree(
    train: FeatureMatrix,
    params: TreeParams,
    feature_sampler: Optional[FeatureSampler] = None,
) -> DecisionTree:
    """Grow a tree by recursive greedy splitting.

    Recursion stops on purity, the depth cap, min_samples_split, or when no
    candidate split strictly reduces impurity. ``feature_sampler``, when
    given, supplies the candidate feature indices for each node (used for
    per-split subsampling in ensembles).
    """
    if train.labels is None:
        raise InputError("training matrix has no labels")
    if train.rows == 0:
        raise InputError("training matrix is empty")
    X, y = train.values, train.labels
    n_features = X.shape[1]
    all_features = np.arange(n_features, dtype=np.int64)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    counts: list[np.ndarray] = []
    decrease: list[float] = []

    def new_node(node_counts: np.ndarray) -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(node_counts)
        decrease.append(0.0)
        return len(feature) - 1

    def build(idx: np.ndarray, depth: int) -> int:
        node_counts = np.bincount(y[idx], minlength=N_CLASSES).astype(np.int64)
        node = new_node(node_counts)
        if (
            depth >= params.max_depth
            or idx.size < params.min_samples_split
            or (node_counts == idx.size).any()
        ):
            return node
        candidates = all_features if feature_sampler is None else feature_sampler()
        found = best_split(X[idx], y[idx], candidates, params.min_impurity_decrease)
        if found is None:
            return node
        f, t, d = found
        go_left = X[idx, f] <= t
        feature[node] = f
        threshold[node] = t
        decrease[node] = d
        left[node] = build(idx[go_left], depth + 1)
        right[node] = build(idx[~go_left], depth + 1)
        return node

    build(np.arange(train.rows, dtype=np.int64), 0)
    return DecisionTree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        counts=np.stack(counts).astype(np.int64),
        decrease=np.array(decrease, dtype=np.float64),
        params=params,
        n_features=n_features,
        schema_fingerprint=train.schema.fingerprint(),
    )


def _leaf_for(tree: DecisionTree, x: np.ndarray) -> int:
    node = 0
    while tree.left[node] >= 0:
        node = int(tree.left[node]) if x[tree.feature[node]] <= tree.threshold[node] else int(tree.right[node])
    return node


def predict_tree(tree: DecisionTree, x: np.ndarray) -> np.ndarray:
    """Class probability vector for one encoded record."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (tree.n_features,):
        raise InputError(f"feature vector has length {x.shape[0]}, tree expects {tree.n_features}")
    leaf = _leaf_for(tree, x)
    c = tree.counts[leaf].astype(np.float64)
    return c / c.sum()


def predict_matrix(tree: DecisionTree, X: np.ndarray) -> np.ndarray:
    """Probability matrix for many rows at once (frontier propagation)."""
    if X.shape[1] != tree.n_features:
        raise InputError(f"matrix has {X.shape[1]} features, tree expects {tree.n_features}")
    n = X.shape[0]
    out = np.empty((n, N_CLASSES), dtype=np.float64)
    stack = [(0, np.arange(n, dtype=np.int64))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if tree.left[node] < 0:
            c = tree.counts[node].astype(np.float64)
            out[idx] = c / c.sum()
            continue
        go_left = X[idx, tree.feature[node]] <= tree.threshold[node]
        stack.append((int(tree.left[node]), idx[go_left]))
        stack.append((int(tree.right[node]), idx[~go_left]))
    return out


def leaf_paths(tree: DecisionTree) -> list[tuple[list[tuple[int, str, float]], int]]:
    """(conditions, leaf index) per leaf; conditions are (feature, '<='|'>', threshold)."""
    paths: list[tuple[list[tuple[int, str, float]], int]] = []

    def walk(node: int, conds: list[tuple[int, str, float]]) -> None:
        if tree.left[node] < 0:
            paths.append((conds, node))
            return
        f, t = int(tree.feature[node]), float(tree.threshold[node])
        walk(int(tree.left[node]), conds + [(f, "<=", t)])
        walk(int(tree.right[node]), conds + [(f, ">", t)])

    walk(0, [])
    return paths


def _simplify(conds: list[tuple[int, str, float]]) -> list[tuple[int, str, float]]:
    upper: dict[int, float] = {}
    lower: dict[int, float] = {}
    order: list[int] = []
    for f, op, t in conds:
        if f not in order:
            order.append(f)
        if op == "<=":
            upper[f] = min(upper.get(f, math.inf), t)
        else:
            lower[f] = max(lower.get(f, -math.inf), t)
    out = []
    for f in order:
        if f in lower:
            out.append((f, ">", lower[f]))
        if f in upper:
            out.append((f, "<=", upper[f]))
    return out


def extract_rules(tree: DecisionTree, schema: FeatureSchema) -> list[str]:
    """Human-readable rule per leaf, thresholds mapped back to raw units."""
    if schema.fingerprint() != tree.schema_fingerprint:
        raise InputError("schema does not match the tree's fingerprint")
    n_cat = schema.n_categorical
    numeric = {n_cat + i: spec for i, spec in enumerate(schema.numeric_specs)}
    cat_names: list[tuple[str, str]] = []
    for fld, cats in schema.categorical_specs:
        cat_names.extend((fld, c) for c in cats)

    rules = []
    for conds, leaf in leaf_paths(tree):
        rendered = []
        eq_fields: set[str] = set()
        simplified = _simplify(conds)
        for f, op, t in simplified:
            if f < n_cat and op == ">":
                eq_fields.add(cat_names[f][0])
        for f, op, t in simplified:
            if f < n_cat:
                fld, cat = cat_names[f]
                if op == ">":
                    rendered.append(f"{fld} = {cat}")
                elif fld not in eq_fields:
                    rendered.append(f"{fld} ≠ {cat}")
            else:
                fld, lo, hi = numeric[f]
                raw = round(lo + t * (hi - lo), 4)
                symbol = "≤" if op == "<=" else ">"
                rendered.append(f"{fld} {symbol} {raw}")
        c = tree.counts[leaf]
        klass = STRATEGIES[int(np.argmax(c))]
        purity = float(c.max() / c.sum())
        if rendered:
            rules.append(f"IF {' AND '.join(rendered)} THEN {klass} (purity {purity:.2f})")
        else:
            rules.append(f"ALWAYS → {klass} (purity {purity:.2f})")
    return rules
