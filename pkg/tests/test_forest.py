import numpy as np
import pytest

from acoubench.errors import ParameterError
from acoubench.models import DecisionTree, RandomForestClassifier, default_max_features


class TestDecisionTree:
    def test_full_purity_on_duplicate_free_data(self, rng):
        X = rng.normal(size=(40, 3))
        y = rng.integers(0, 3, size=40)
        tree = DecisionTree(max_depth=64, max_features=None, seed=0).fit(X, y, 3)
        assert (tree.predict_class(X) == y).mean() == 1.0

    def test_pure_node_stops_growing(self):
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([1, 1, 1])
        tree = DecisionTree(seed=0).fit(X, y, 2)
        assert tree.root.is_leaf


class TestRandomForest:
    def test_feature_subset_size(self):
        assert default_max_features(127) == 11
        assert default_max_features(4) == 2
        assert default_max_features(1) == 1

    def test_hand_tallied_majority_vote(self, rng):
        X = rng.normal(size=(20, 2))
        y = (X[:, 0] > 0).astype(int)
        model = RandomForestClassifier(n_trees=3, seed=1).fit(X, y)
        queries = rng.normal(size=(6, 2))
        probs = model.predict_proba(queries)
        votes = np.zeros((6, 2))
        for tree in model.trees_:
            votes[np.arange(6), tree.predict_class(queries)] += 1
        np.testing.assert_allclose(probs, votes / 3)

    def test_probabilities_are_vote_fractions(self, rng):
        X = rng.normal(size=(60, 4))
        y = rng.integers(0, 3, size=60)
        model = RandomForestClassifier(n_trees=7, seed=2).fit(X, y)
        probs = model.predict_proba(rng.normal(size=(10, 4)))
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)
        # every entry is a multiple of 1/7
        np.testing.assert_allclose(np.round(probs * 7), probs * 7, atol=1e-12)

    def test_importances_nonnegative_and_normalized(self, rng):
        X = rng.normal(size=(80, 6))
        y = (X[:, 2] > 0).astype(int)
        model = RandomForestClassifier(n_trees=10, seed=3).fit(X, y)
        imp = model.feature_importances()
        assert np.all(imp >= 0)
        assert imp.sum() == pytest.approx(1.0)
        # the split feature should dominate
        assert np.argmax(imp) == 2

    def test_deterministic_given_seed(self, rng):
        X = rng.normal(size=(50, 4))
        y = rng.integers(0, 2, size=50)
        q = rng.normal(size=(8, 4))
        a = RandomForestClassifier(n_trees=5, seed=9).fit(X, y)
        b = RandomForestClassifier(n_trees=5, seed=9).fit(X, y)
        np.testing.assert_array_equal(a.predict_proba(q), b.predict_proba(q))

    def test_invalid_tree_count(self):
        with pytest.raises(ParameterError):
            RandomForestClassifier(n_trees=0)
