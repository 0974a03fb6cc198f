import json
from fractions import Fraction

import numpy as np
import pytest

from pqmigrate.cart import (
    DecisionTree,
    TreeParams,
    best_split,
    extract_rules,
    fit_tree,
    gini,
    leaf_paths,
    predict_matrix,
    predict_tree,
)
from pqmigrate.domain import Dataset, STRATEGIES
from pqmigrate.errors import InputError
from pqmigrate.features import FeatureMatrix, build_schema, encode_dataset

from conftest import make_record

N_CLASSES = len(STRATEGIES)


def matrix_from(X, y, schema=None):
    if schema is None:
        schema = build_schema(Dataset([make_record()]))
    return FeatureMatrix(
        values=np.asarray(X, dtype=np.float64),
        schema=schema,
        labels=np.asarray(y, dtype=np.int64),
    )


# ---------------------------------------------------------------- oracle ---
# Plain-Python greedy split search with exact rational arithmetic; shares no
# code with the implementation under test.

def oracle_gini(counts):
    n = sum(counts)
    return 1 - sum(Fraction(c, n) ** 2 for c in counts)


def oracle_best_split(rows, labels):
    n = len(rows)
    best = None  # (delta: Fraction, feature, threshold)
    n_features = len(rows[0])
    parent_counts = [labels.count(c) for c in range(N_CLASSES)]
    parent = oracle_gini(parent_counts)
    for f in range(n_features):
        values = sorted(set(r[f] for r in rows))
        for lo, hi in zip(values, values[1:]):
            threshold = (lo + hi) / 2.0
            left = [i for i in range(n) if rows[i][f] <= threshold]
            right = [i for i in range(n) if rows[i][f] > threshold]
            lc = [sum(1 for i in left if labels[i] == c) for c in range(N_CLASSES)]
            rc = [sum(1 for i in right if labels[i] == c) for c in range(N_CLASSES)]
            delta = parent - Fraction(len(left), n) * oracle_gini(lc) - Fraction(
                len(right), n
            ) * oracle_gini(rc)
            if best is None or delta > best[0]:
                best = (delta, f, threshold)
    if best is None or best[0] <= 0:
        return None
    return best[1], best[2], best[0]


def oracle_tree(rows, labels, max_depth, depth=0):
    counts = [labels.count(c) for c in range(N_CLASSES)]
    if depth >= max_depth or len(rows) < 2 or max(counts) == len(rows):
        return {"counts": counts}
    found = oracle_best_split(rows, labels)
    if found is None:
        return {"counts": counts}
    f, t, _ = found
    li = [i for i in range(len(rows)) if rows[i][f] <= t]
    ri = [i for i in range(len(rows)) if rows[i][f] > t]
    return {
        "feature": f,
        "threshold": t,
        "counts": counts,
        "left": oracle_tree([rows[i] for i in li], [labels[i] for i in li], max_depth, depth + 1),
        "right": oracle_tree([rows[i] for i in ri], [labels[i] for i in ri], max_depth, depth + 1),
    }


def tree_as_nested(tree, node=0):
    if tree.left[node] < 0:
        return {"counts": tree.counts[node].tolist()}
    return {
        "feature": int(tree.feature[node]),
        "threshold": float(tree.threshold[node]),
        "counts": tree.counts[node].tolist(),
        "left": tree_as_nested(tree, int(tree.left[node])),
        "right": tree_as_nested(tree, int(tree.right[node])),
    }


# ------------------------------------------------------------------ gini ---

def test_gini_values():
    assert gini([10, 0, 0, 0, 0]) == 0.0
    assert gini([1, 1]) == 0.5
    assert gini([241] * 5) == pytest.approx(0.8)
    with pytest.raises(InputError):
        gini([0, 0, 0])
    with pytest.raises(InputError):
        gini([-1, 2])


def test_gini_fuzzed_range():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        c = rng.integers(0, 50, size=rng.integers(2, 8))
        if c.sum() == 0:
            c[0] = 1
        g = gini(c)
        assert 0.0 <= g <= 1.0 - 1.0 / len(c) + 1e-12


# ------------------------------------------------------------ best_split ---

def test_best_split_separable_toy():
    X = np.array([[0.1], [0.2], [0.8]])
    y = np.array([0, 0, 1])
    f, t, delta = best_split(X, y, np.array([0]))
    assert f == 0 and t == pytest.approx(0.5) and delta > 0


def test_best_split_no_separation():
    X = np.ones((4, 2))
    y = np.array([0, 1, 0, 1])
    assert best_split(X, y, np.array([0, 1])) is None


def test_best_split_tiebreak_lowest_feature():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    y = np.array([0, 0, 1, 1])
    f, t, _ = best_split(X, y, np.array([0, 1]))
    assert f == 0 and t == pytest.approx(0.5)


def test_best_split_matches_oracle_on_random_instances():
    rng = np.random.default_rng(42)
    for trial in range(30):
        n = int(rng.integers(5, 60))
        f = int(rng.integers(1, 5))
        X = rng.integers(0, 6, size=(n, f)).astype(np.float64)
        y = rng.integers(0, 3, size=n)
        mine = best_split(X, y, np.arange(f))
        theirs = oracle_best_split([tuple(r) for r in X.tolist()], y.tolist())
        if theirs is None:
            assert mine is None
        else:
            assert mine is not None
            assert mine[0] == theirs[0]
            assert mine[1] == pytest.approx(theirs[1])
            assert mine[2] == pytest.approx(float(theirs[2]), abs=1e-12)


# -------------------------------------------------------------- fit_tree ---

def test_pure_input_single_leaf():
    X = np.random.default_rng(0).random((10, 3))
    tree = fit_tree(matrix_from(X, [2] * 10), TreeParams(max_depth=5))
    assert tree.n_nodes == 1 and tree.n_leaves == 1
    assert tree.depth() == 0


def test_depth_one_is_root_best_split():
    rng = np.random.default_rng(1)
    X = rng.random((40, 4))
    y = (X[:, 2] > 0.5).astype(int)
    stump = fit_tree(matrix_from(X, y), TreeParams(max_depth=1))
    expected = best_split(X, y, np.arange(4))
    assert stump.depth() == 1
    assert int(stump.feature[0]) == expected[0]
    assert float(stump.threshold[0]) == pytest.approx(expected[1])


def test_fit_rejects_unlabeled():
    schema = build_schema(Dataset([make_record()]))
    with pytest.raises(InputError):
        fit_tree(FeatureMatrix(values=np.ones((3, 2)), schema=schema, labels=None), TreeParams())


def test_depth2_trees_match_exhaustive_oracle():
    rng = np.random.default_rng(2024)
    for trial in range(20):
        n = int(rng.integers(20, 200))
        f = int(rng.integers(2, 7))
        X = (rng.integers(0, 8, size=(n, f)) / 7.0).astype(np.float64)
        y = rng.integers(0, N_CLASSES, size=n)
        depth = int(rng.integers(1, 3))
        tree = fit_tree(matrix_from(X, y), TreeParams(max_depth=depth))
        expected = oracle_tree([tuple(r) for r in X.tolist()], y.tolist(), depth)
        assert tree_as_nested(tree) == expected, f"trial {trial}"


def test_stump_matches_oracle_at_full_scale():
    rng = np.random.default_rng(99)
    X = (rng.integers(0, 12, size=(500, 10)) / 11.0).astype(np.float64)
    y = rng.integers(0, N_CLASSES, size=500)
    stump = fit_tree(matrix_from(X, y), TreeParams(max_depth=1))
    expected = oracle_tree([tuple(r) for r in X.tolist()], y.tolist(), 1)
    assert tree_as_nested(stump) == expected


def test_structural_invariants_on_fitted_tree(default_dataset):
    train = encode_dataset(default_dataset, build_schema(default_dataset))
    tree = fit_tree(train, TreeParams(max_depth=5))
    assert tree.depth() <= 5
    for node in range(tree.n_nodes):
        if tree.left[node] >= 0:
            left, right = int(tree.left[node]), int(tree.right[node])
            assert (tree.counts[node] == tree.counts[left] + tree.counts[right]).all()
            assert tree.decrease[node] > 0  # accepted splits strictly reduce impurity
        else:
            assert tree.counts[node].sum() > 0


def test_refit_is_bit_stable(default_dataset):
    train = encode_dataset(default_dataset, build_schema(default_dataset))
    a = fit_tree(train, TreeParams(max_depth=5))
    b = fit_tree(train, TreeParams(max_depth=5))
    assert (a.feature == b.feature).all()
    assert (a.threshold == b.threshold).all()
    assert (a.counts == b.counts).all()


# --------------------------------------------------------------- predict ---

def test_predict_normalizes_leaf_counts():
    doc = {
        "params": {"max_depth": 5, "min_samples_split": 2, "min_impurity_decrease": 0.0},
        "n_features": 3,
        "schema_fingerprint": "",
        "root": {"counts": [8, 2, 0, 0, 0]},
    }
    tree = DecisionTree.from_dict(doc)
    assert predict_tree(tree, np.zeros(3)).tolist() == [0.8, 0.2, 0.0, 0.0, 0.0]


def test_predict_pure_leaf_returns_one(default_dataset):
    train = encode_dataset(default_dataset, build_schema(default_dataset))
    tree = fit_tree(train, TreeParams(max_depth=12))
    proba = predict_matrix(tree, train.values)
    hard = proba.max(axis=1) == 1.0
    assert hard.mean() > 0.9  # deep tree is pure on most training rows
    assert (proba[hard].argmax(1) == train.labels[hard]).all()


def test_predict_simplex_fuzzed(default_dataset):
    train = encode_dataset(default_dataset, build_schema(default_dataset))
    tree = fit_tree(train, TreeParams(max_depth=5))
    rng = np.random.default_rng(0)
    X = rng.random((500, train.values.shape[1]))
    proba = predict_matrix(tree, X)
    assert np.allclose(proba.sum(axis=1), 1.0, atol=1e-12)
    assert (proba >= 0).all()


def test_predict_rejects_wrong_width(default_dataset):
    train = encode_dataset(default_dataset, build_schema(default_dataset))
    tree = fit_tree(train, TreeParams(max_depth=3))
    with pytest.raises(InputError):
        predict_tree(tree, np.zeros(tree.n_features + 1))
    with pytest.raises(InputError):
        predict_matrix(tree, np.zeros((4, tree.n_features - 1)))


# ----------------------------------------------------------------- rules ---

def test_rules_single_leaf_tree():
    X = np.zeros((5, 29))
    schema = build_schema(Dataset([make_record()]))
    # schema of a single record has 1+1 categories + 5 numerics = 7 features
    X = np.zeros((5, schema.n_features))
    tree = fit_tree(matrix_from(X, [0] * 5, schema), TreeParams(max_depth=3))
    rules = extract_rules(tree, schema)
    assert rules == ["ALWAYS → no_action_needed (purity 1.00)"]


def test_rules_denormalize_thresholds():
    ds = Dataset(
        [make_record(security_lifetime=1, recommended_strategy="no_action_needed")] * 3
        + [make_record(security_lifetime=29, recommended_strategy="immediate_hybrid")] * 3
    )
    schema = build_schema(ds)
    train = encode_dataset(ds, schema)
    stump = fit_tree(train, TreeParams(max_depth=1))
    rules = extract_rules(stump, schema)
    assert len(rules) == 2
    assert any("security_lifetime ≤ 15.0" in r for r in rules)
    assert any("security_lifetime > 15.0" in r for r in rules)


def test_rule_count_equals_leaf_count(default_dataset):
    schema = build_schema(default_dataset)
    train = encode_dataset(default_dataset, schema)
    tree = fit_tree(train, TreeParams(max_depth=5))
    rules = extract_rules(tree, schema)
    assert len(rules) == tree.n_leaves
    assert all(("THEN" in r) or ("ALWAYS" in r) for r in rules)


def test_rules_reject_mismatched_schema(default_dataset):
    schema = build_schema(default_dataset)
    train = encode_dataset(default_dataset, schema)
    tree = fit_tree(train, TreeParams(max_depth=3))
    other = build_schema(Dataset(default_dataset.records[:3]))
    with pytest.raises(InputError):
        extract_rules(tree, other)


def test_leaf_paths_route_like_the_tree(default_dataset):
    schema = build_schema(default_dataset)
    train = encode_dataset(default_dataset, schema)
    tree = fit_tree(train, TreeParams(max_depth=5))
    paths = leaf_paths(tree)
    rng = np.random.default_rng(9)
    rows = rng.integers(0, train.rows, size=200)
    for i in rows:
        x = train.values[i]
        matches = [
            leaf
            for conds, leaf in paths
            if all((x[f] <= t) if op == "<=" else (x[f] > t) for f, op, t in conds)
        ]
        assert len(matches) == 1
        expected = predict_tree(tree, x).argmax()
        assert tree.counts[matches[0]].argmax() == expected


# --------------------------------------------------------- serialization ---

def test_tree_json_round_trip(default_dataset):
    schema = build_schema(default_dataset)
    train = encode_dataset(default_dataset, schema)
    tree = fit_tree(train, TreeParams(max_depth=5))
    doc = json.loads(json.dumps(tree.to_dict()))
    again = DecisionTree.from_dict(doc)
    rng = np.random.default_rng(1)
    X = rng.random((100, train.values.shape[1]))
    assert (predict_matrix(tree, X) == predict_matrix(again, X)).all()


def test_tree_params_validation():
    with pytest.raises(InputError):
        TreeParams(max_depth=0)
    with pytest.raises(InputError):
        TreeParams(min_samples_split=1)
    with pytest.raises(InputError):
        TreeParams(min_impurity_decrease=-0.1)
