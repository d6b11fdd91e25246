"""Random forest built on Gini decision trees with per-node feature draws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from .base import Classifier


@dataclass
class _TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: "_TreeNode | None" = None
    right: "_TreeNode | None" = None
    class_counts: np.ndarray | None = None  # leaves only

    @property
    def is_leaf(self) -> bool:
        return self.class_counts is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"counts": self.class_counts.tolist()}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "_TreeNode":
        if "counts" in d:
            return cls(class_counts=np.array(d["counts"], dtype=float))
        return cls(
            feature=d["feature"],
            threshold=d["threshold"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - float(np.sum(p * p))


def _best_split(X, y, n_classes, feature_ids):
    """Best (feature, threshold, gain) over candidate features.

    Thresholds are midpoints between consecutive distinct sorted values;
    gain is the decrease in Gini impurity weighted by child sizes.
    """
    n = len(y)
    parent_counts = np.bincount(y, minlength=n_classes).astype(float)
    parent_gini = _gini(parent_counts)
    best = (None, 0.0, 0.0)
    onehot = np.eye(n_classes)[y]
    for f in feature_ids:
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        boundaries = np.where(xs[:-1] < xs[1:])[0]
        if len(boundaries) == 0:
            continue
        left_counts = np.cumsum(onehot[order], axis=0)[boundaries]
        left_n = boundaries + 1.0
        right_counts = parent_counts - left_counts
        right_n = n - left_n
        pl = left_counts / left_n[:, None]
        pr = right_counts / right_n[:, None]
        gini_l = 1.0 - np.sum(pl * pl, axis=1)
        gini_r = 1.0 - np.sum(pr * pr, axis=1)
        weighted = (left_n * gini_l + right_n * gini_r) / n
        k = int(np.argmin(weighted))
        gain = parent_gini - weighted[k]
        if gain > best[2] + 1e-15:
            threshold = 0.5 * (xs[boundaries[k]] + xs[boundaries[k] + 1])
            best = (f, float(threshold), float(gain))
    return best


class DecisionTree:
    """Single CART-style classification tree."""

    def __init__(self, max_depth: int = 16, min_samples_split: int = 2,
                 max_features: int | None = None, seed: int = 0):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.seed = seed

    def fit(self, X, y, n_classes: int):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.n_classes = n_classes
        self.n_features = X.shape[1]
        self.feature_importance = np.zeros(self.n_features)
        rng = np.random.default_rng(self.seed)
        self._n_total = len(y)
        self.root = self._grow(X, y, depth=0, rng=rng)
        return self

    def _grow(self, X, y, depth, rng):
        counts = np.bincount(y, minlength=self.n_classes).astype(float)
        if (
            depth >= self.max_depth
            or len(y) < self.min_samples_split
            or np.count_nonzero(counts) <= 1
        ):
            return _TreeNode(class_counts=counts)
        m = self.max_features or X.shape[1]
        feature_ids = rng.choice(self.n_features, size=min(m, self.n_features), replace=False)
        feature, threshold, gain = _best_split(X, y, self.n_classes, feature_ids)
        if feature is None or gain <= 0:
            return _TreeNode(class_counts=counts)
        self.feature_importance[feature] += gain * len(y) / self._n_total
        mask = X[:, feature] <= threshold
        return _TreeNode(
            feature=int(feature),
            threshold=threshold,
            left=self._grow(X[mask], y[mask], depth + 1, rng),
            right=self._grow(X[~mask], y[~mask], depth + 1, rng),
        )

    def predict_class(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(len(X), dtype=int)
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = int(np.argmax(node.class_counts))
        return out


def default_max_features(n_features: int) -> int:
    """Per-node feature draw: floor of the square root of the feature count."""
    return max(1, int(math.isqrt(n_features)))


class RandomForestClassifier(Classifier):
    """Bagged Gini trees; probabilities are the per-class vote fractions."""

    kind = "rf"

    def __init__(self, n_trees: int = 60, max_depth: int = 16,
                 min_samples_split: int = 2, seed: int = 0):
        super().__init__(seed=seed)
        if n_trees < 1:
            raise ParameterError("n_trees must be >= 1")
        self.n_trees = int(n_trees)
        self.max_depth = int(max_depth)
        self.min_samples_split = int(min_samples_split)

    def _fit(self, X, y):
        n, d = X.shape
        m_try = default_max_features(d)
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        self.trees_ = []
        for t in range(self.n_trees):
            rng = np.random.default_rng(seeds[t])
            sample = rng.integers(0, n, size=n)  # bootstrap of size n
            tree = DecisionTree(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                max_features=m_try,
                seed=rng.integers(2 ** 31),
            )
            tree.fit(X[sample], y[sample], self.class_count)
            self.trees_.append(tree)

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        X = np.atleast_2d(np.asarray(X, dtype=float))
        votes = np.zeros((len(X), self.class_count))
        for tree in self.trees_:
            votes[np.arange(len(X)), tree.predict_class(X)] += 1.0
        return votes / self.n_trees

    def feature_importances(self) -> np.ndarray:
        """Mean impurity decrease per feature, normalized to sum to 1."""
        self._check_fitted()
        total = np.mean([tree.feature_importance for tree in self.trees_], axis=0)
        s = total.sum()
        if s == 0:
            return np.full_like(total, 1.0 / len(total))
        return total / s

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "seed": self.seed,
            "class_count": self.class_count,
            "trees": [
                {
                    "root": tree.root.to_dict(),
                    "importance": tree.feature_importance.tolist(),
                    "n_features": tree.n_features,
                }
                for tree in self.trees_
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForestClassifier":
        model = cls(
            n_trees=d["n_trees"],
            max_depth=d["max_depth"],
            min_samples_split=d["min_samples_split"],
            seed=d["seed"],
        )
        model.class_count = d["class_count"]
        model.trees_ = []
        for td in d["trees"]:
            tree = DecisionTree(max_depth=d["max_depth"])
            tree.root = _TreeNode.from_dict(td["root"])
            tree.n_classes = d["class_count"]
            tree.n_features = td["n_features"]
            tree.feature_importance = np.array(td["importance"], dtype=float)
            model.trees_.append(tree)
        return model
