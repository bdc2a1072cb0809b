"""Embedding quality proxy: random-forest 10-fold cross-validated accuracy.

The forest is scikit-learn's: 100 Gini CART trees, bootstrap sampling,
ceil(sqrt(p)) candidate features per split, grown to purity. Fold
assignment is stratified and depends only on the labels and the seed, so
the original data and the embedding are always scored on identical folds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.model_selection import StratifiedKFold

from .data import Dataset

__all__ = ["ForestConfig", "accuracy_pair", "cv_accuracy"]


@dataclass(frozen=True)
class ForestConfig:
    """Random-forest hyperparameters (splits use Gini, trees grow to purity)."""

    n_trees: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")


def _derive_seeds(seed: int) -> tuple[int, int]:
    fold_seed, tree_seed = np.random.SeedSequence(seed & (2**64 - 1)).generate_state(2)
    return int(fold_seed), int(tree_seed)


def _forest(cfg: ForestConfig, num_features: int, tree_seed: int) -> RandomForestClassifier:
    return RandomForestClassifier(
        n_estimators=cfg.n_trees,
        criterion="gini",
        max_features=min(num_features, math.ceil(math.sqrt(num_features))),
        bootstrap=True,
        max_depth=None,
        random_state=tree_seed,
    )


def cv_accuracy(X: np.ndarray, y, cfg: ForestConfig, folds: int = 10) -> float:
    """Mean accuracy over seeded stratified folds; deterministic given cfg.seed."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    n = X.shape[0]
    if folds > n:
        raise ValueError(f"folds ({folds}) cannot exceed the number of instances ({n})")
    if len(np.unique(y)) < 2:
        return 1.0  # a single class is trivially classified

    fold_seed, tree_seed = _derive_seeds(cfg.seed)
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=fold_seed)
    accuracies = []
    for train_idx, test_idx in splitter.split(X, y):
        forest = _forest(cfg, X.shape[1], tree_seed)
        forest.fit(X[train_idx], y[train_idx])
        predictions = forest.predict(X[test_idx])
        accuracies.append(float(np.mean(predictions == y[test_idx])))
    return float(np.mean(accuracies))


def accuracy_pair(
    dataset: Dataset, embedding: np.ndarray, cfg: ForestConfig, folds: int = 10
) -> tuple[float, float]:
    """(accuracy on scaled original, accuracy on embedding), identical folds."""
    embedding = np.asarray(embedding, dtype=float)
    if embedding.shape[0] != dataset.num_instances:
        raise ValueError(
            f"embedding has {embedding.shape[0]} rows for {dataset.num_instances} instances"
        )
    labels = np.asarray(dataset.labels)
    original = cv_accuracy(dataset.scaled, labels, cfg, folds=folds)
    embedded = cv_accuracy(embedding, labels, cfg, folds=folds)
    return original, embedded
