"""Gradient-boosted regression trees with a second-order multiclass objective.

Each round fits one tree per class to the softmax gradients and
hessians. Leaf weights take the closed-form second-order optimum
w* = -G / (H + lambda); a split is kept only when its gain
0.5 * (GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)) exceeds the per-leaf
penalty gamma. The recorded training loss includes the regularizer
gamma * T + lambda/2 * sum(w^2) over the shrunken weights actually
applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from .base import Classifier


@dataclass
class _BoostNode:
    feature: int = -1
    threshold: float = 0.0
    left: "_BoostNode | None" = None
    right: "_BoostNode | None" = None
    weight: float | None = None  # leaves only

    @property
    def is_leaf(self) -> bool:
        return self.weight is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"weight": self.weight}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "_BoostNode":
        if "weight" in d:
            return cls(weight=d["weight"])
        return cls(
            feature=d["feature"],
            threshold=d["threshold"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


def leaf_weight(grad_sum: float, hess_sum: float, lambda_l2: float) -> float:
    """Closed-form minimizer of the second-order leaf objective."""
    return -grad_sum / (hess_sum + lambda_l2)


def _leaf_score(g: float, h: float, lambda_l2: float) -> float:
    return g * g / (h + lambda_l2)


def _build_tree(X, g, h, depth, max_depth, gamma_split, lambda_l2):
    G, H = float(g.sum()), float(h.sum())
    node_weight = leaf_weight(G, H, lambda_l2)
    if depth >= max_depth or len(g) < 2:
        return _BoostNode(weight=node_weight), [node_weight]
    best_gain = 0.0
    best = None
    parent_score = _leaf_score(G, H, lambda_l2)
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        boundaries = np.where(xs[:-1] < xs[1:])[0]
        if len(boundaries) == 0:
            continue
        gl = np.cumsum(g[order])[boundaries]
        hl = np.cumsum(h[order])[boundaries]
        gains = 0.5 * (
            gl ** 2 / (hl + lambda_l2)
            + (G - gl) ** 2 / (H - hl + lambda_l2)
            - parent_score
        ) - gamma_split
        k = int(np.argmax(gains))
        if gains[k] > best_gain + 1e-15:
            best_gain = float(gains[k])
            best = (f, 0.5 * (xs[boundaries[k]] + xs[boundaries[k] + 1]))
    if best is None:
        return _BoostNode(weight=node_weight), [node_weight]
    f, threshold = best
    mask = X[:, f] <= threshold
    left, lw = _build_tree(X[mask], g[mask], h[mask], depth + 1, max_depth, gamma_split, lambda_l2)
    right, rw = _build_tree(X[~mask], g[~mask], h[~mask], depth + 1, max_depth, gamma_split, lambda_l2)
    return _BoostNode(feature=int(f), threshold=float(threshold), left=left, right=right), lw + rw


def _tree_predict(node: _BoostNode, X) -> np.ndarray:
    out = np.empty(len(X))
    for i, row in enumerate(X):
        cur = node
        while not cur.is_leaf:
            cur = cur.left if row[cur.feature] <= cur.threshold else cur.right
        out[i] = cur.weight
    return out


def _softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class GradientBoostedTrees(Classifier):
    """Multiclass softmax boosting with shrinkage."""

    kind = "gbt"

    def __init__(
        self,
        n_rounds: int = 60,
        learning_rate: float = 0.3,
        max_depth: int = 3,
        gamma_split: float = 0.0,
        lambda_l2: float = 1.0,
        seed: int = 0,
    ):
        super().__init__(seed=seed)
        if n_rounds < 1:
            raise ParameterError("n_rounds must be >= 1")
        if not 0 < learning_rate <= 1:
            raise ParameterError("learning_rate must be in (0, 1]")
        self.n_rounds = int(n_rounds)
        self.learning_rate = float(learning_rate)
        self.max_depth = int(max_depth)
        self.gamma_split = float(gamma_split)
        self.lambda_l2 = float(lambda_l2)

    def _regularized_loss(self, scores, onehot):
        probs = _softmax(scores)
        ce = -float(np.sum(onehot * np.log(np.maximum(probs, 1e-12))))
        return ce + self._omega

    def _fit(self, X, y):
        n, _ = X.shape
        C = self.class_count
        onehot = np.eye(C)[y]
        scores = np.zeros((n, C))
        self.trees_ = []  # list of rounds, each a list of C trees
        self._omega = 0.0
        self.loss_history_ = [self._regularized_loss(scores, onehot)]
        for _ in range(self.n_rounds):
            probs = _softmax(scores)
            round_trees = []
            for c in range(C):
                g = probs[:, c] - onehot[:, c]
                h = probs[:, c] * (1.0 - probs[:, c])
                tree, weights = _build_tree(
                    X, g, h, 0, self.max_depth, self.gamma_split, self.lambda_l2
                )
                applied = self.learning_rate * _tree_predict(tree, X)
                scores[:, c] += applied
                round_trees.append(tree)
                shrunk = self.learning_rate * np.asarray(weights)
                self._omega += self.gamma_split * len(weights)
                self._omega += 0.5 * self.lambda_l2 * float(np.sum(shrunk ** 2))
            self.trees_.append(round_trees)
            self.loss_history_.append(self._regularized_loss(scores, onehot))

    def _raw_scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        scores = np.zeros((len(X), self.class_count))
        for round_trees in self.trees_:
            for c, tree in enumerate(round_trees):
                scores[:, c] += self.learning_rate * _tree_predict(tree, X)
        return scores

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        return _softmax(self._raw_scores(X))

    def to_dict(self) -> dict:
        return {
            "n_rounds": self.n_rounds,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "gamma_split": self.gamma_split,
            "lambda_l2": self.lambda_l2,
            "seed": self.seed,
            "class_count": self.class_count,
            "trees": [[t.to_dict() for t in rnd] for rnd in self.trees_],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GradientBoostedTrees":
        model = cls(
            n_rounds=d["n_rounds"],
            learning_rate=d["learning_rate"],
            max_depth=d["max_depth"],
            gamma_split=d["gamma_split"],
            lambda_l2=d["lambda_l2"],
            seed=d["seed"],
        )
        model.class_count = d["class_count"]
        model.trees_ = [[_BoostNode.from_dict(t) for t in rnd] for rnd in d["trees"]]
        return model
