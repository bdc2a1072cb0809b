"""Minimized costs scoring how well an embedding preserves data structure.

Two of the costs (``gpmal`` and ``gpmal2``) measure neighborhood-order
preservation with a normalized Spearman footrule: for each instance, its
nearest neighbors in the original (scaled) space are re-ranked by embedding
distance, and the cost is the mean L1 rank displacement. ``gpmal`` uses the
k nearest neighbors; ``gpmal2`` uses multi-scale neighbors at geometric
positions 1, 2, 4, 8, ... ``nrmse`` compares full pairwise distance
matrices directly. All three are exposed through a registry keyed by
identifier so run configs, the CLI, the API, and the explanation prompt
agree on names and definitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist, pdist

__all__ = [
    "DEFAULT_NEIGHBORS",
    "FITNESS_IDS",
    "FITNESS_REGISTRY",
    "FitnessSpec",
    "NeighborTable",
    "build_neighbor_table",
    "geometric_positions",
    "gpmal_cost",
    "gpmal2_cost",
    "make_fitness",
    "nrmse_cost",
]

# Neighborhood size for the gpmal cost: enough context to reflect global
# structure on mid-sized datasets while keeping evaluation O(n * k log k).
DEFAULT_NEIGHBORS = 100


@dataclass(frozen=True)
class NeighborTable:
    """For each instance, its k nearest neighbors in the scaled original space.

    Neighbors are ordered by ascending Euclidean distance with ties broken
    by ascending instance index; an instance is never its own neighbor.
    Built once per run and shared read-only.
    """

    k: int
    indices: np.ndarray  # (n, k) int

    def __post_init__(self):
        self.indices.setflags(write=False)

    @property
    def n(self) -> int:
        return self.indices.shape[0]


def build_neighbor_table(scaled: np.ndarray, k: int) -> NeighborTable:
    """Exact k-NN from full pairwise Euclidean distances."""
    scaled = np.asarray(scaled, dtype=float)
    n = scaled.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, n-1] = [1, {n - 1}], got {k}")
    d2 = cdist(scaled, scaled, metric="sqeuclidean")
    np.fill_diagonal(d2, np.inf)
    # stable argsort on a row == order by (distance, index)
    order = np.argsort(d2, axis=1, kind="stable")
    return NeighborTable(k=k, indices=np.ascontiguousarray(order[:, :k]))


def _embedding_ranks(embedding: np.ndarray, neighbors: np.ndarray) -> np.ndarray:
    """Rank each instance's table neighbors by embedding distance from it.

    Returns (n, k) zero-based ranks aligned with the table columns; ties
    broken by neighbor instance index, mirroring the table's tie rule.
    """
    diffs = embedding[neighbors] - embedding[:, None, :]
    d2 = np.einsum("ijk,ijk->ij", diffs, diffs)
    order = np.lexsort((neighbors, d2), axis=-1)
    ranks = np.empty_like(order)
    rows = np.arange(order.shape[0])[:, None]
    ranks[rows, order] = np.arange(order.shape[1])[None, :]
    return ranks


def _footrule_cost(embedding: np.ndarray, neighbors: np.ndarray) -> float:
    k = neighbors.shape[1]
    max_footrule = (k * k) // 2
    if max_footrule == 0:  # a single neighbor is always in order
        return 0.0
    ranks = _embedding_ranks(embedding, neighbors)
    displacement = np.abs(ranks - np.arange(k)[None, :]).sum(axis=1)
    return float(displacement.mean() / max_footrule)


def gpmal_cost(embedding: np.ndarray, nt: NeighborTable) -> float:
    """Mean normalized footrule over each instance's k nearest neighbors.

    In [0, 1]; 0 iff every instance's neighbor ordering survives the
    embedding exactly. Invariant under orthogonal maps and uniform positive
    scaling of the embedding, since only distance ranks matter.
    """
    embedding = np.asarray(embedding, dtype=float)
    return _footrule_cost(embedding, nt.indices)


def geometric_positions(n: int) -> list[int]:
    """Neighbor positions 1, 2, 4, 8, ... capped at n-1."""
    positions = []
    p = 1
    while p <= n - 1:
        positions.append(p)
        p *= 2
    return positions


def gpmal2_cost(embedding: np.ndarray, scaled: np.ndarray) -> float:
    """Footrule cost over multi-scale neighbors at geometric positions."""
    embedding = np.asarray(embedding, dtype=float)
    scaled = np.asarray(scaled, dtype=float)
    neighbors = _gpmal2_neighbors(scaled)
    return _footrule_cost(embedding, neighbors)


def _gpmal2_neighbors(scaled: np.ndarray) -> np.ndarray:
    positions = geometric_positions(scaled.shape[0])
    if not positions:
        raise ValueError("need at least 2 instances")
    table = build_neighbor_table(scaled, k=positions[-1])
    return np.ascontiguousarray(table.indices[:, [p - 1 for p in positions]])


def nrmse_cost(embedding: np.ndarray, scaled: np.ndarray) -> float:
    """Normalized RMSE between original and embedding pairwise distances.

    RMSE over unordered pairs, divided by the range of original distances;
    if all original distances are equal the raw RMSE is returned.
    """
    embedding = np.asarray(embedding, dtype=float)
    scaled = np.asarray(scaled, dtype=float)
    if scaled.shape[0] < 2:
        raise ValueError("need at least 2 instances")
    d_orig = pdist(scaled)
    d_emb = pdist(embedding)
    rmse = float(np.sqrt(np.mean((d_orig - d_emb) ** 2)))
    span = float(d_orig.max() - d_orig.min())
    if span == 0.0:
        return rmse
    return rmse / span


@dataclass(frozen=True)
class FitnessSpec:
    """Registry entry: identifier, display name, prompt definition, factory."""

    fitness_id: str
    display_name: str
    definition: str
    make: Callable[[np.ndarray], Callable[[np.ndarray], float]]


def _make_gpmal(scaled: np.ndarray) -> Callable[[np.ndarray], float]:
    n = scaled.shape[0]
    table = build_neighbor_table(scaled, k=min(n - 1, DEFAULT_NEIGHBORS))
    return lambda embedding: gpmal_cost(embedding, table)


def _make_gpmal2(scaled: np.ndarray) -> Callable[[np.ndarray], float]:
    neighbors = _gpmal2_neighbors(np.asarray(scaled, dtype=float))
    return lambda embedding: _footrule_cost(np.asarray(embedding, dtype=float), neighbors)


def _make_nrmse(scaled: np.ndarray) -> Callable[[np.ndarray], float]:
    scaled = np.asarray(scaled, dtype=float)
    if scaled.shape[0] < 2:
        raise ValueError("need at least 2 instances")
    d_orig = pdist(scaled)
    span = float(d_orig.max() - d_orig.min())

    def cost(embedding: np.ndarray) -> float:
        d_emb = pdist(np.asarray(embedding, dtype=float))
        rmse = float(np.sqrt(np.mean((d_orig - d_emb) ** 2)))
        return rmse if span == 0.0 else rmse / span

    return cost


FITNESS_REGISTRY = {
    "gpmal": FitnessSpec(
        fitness_id="gpmal",
        display_name="GP-MaL",
        definition=(
            "GP-MaL scores an embedding by how well it preserves each "
            "instance's nearest-neighbor ordering. For every instance, its "
            "nearest neighbors (up to 100) in the scaled original space are "
            "re-ranked by their distance in the embedding; the cost is the "
            "average absolute rank displacement, normalized to [0, 1]. "
            "0 means every neighbor ordering is preserved exactly; lower is "
            "better."
        ),
        make=_make_gpmal,
    ),
    "gpmal2": FitnessSpec(
        fitness_id="gpmal2",
        display_name="GP-MaL-2",
        definition=(
            "GP-MaL-2 scores an embedding by how well it preserves "
            "neighborhood structure at multiple scales. For every instance, "
            "the neighbors at geometrically spaced positions 1, 2, 4, 8, ... "
            "in the scaled original space are re-ranked by their distance in "
            "the embedding; the cost is the average absolute rank "
            "displacement, normalized to [0, 1]. 0 means the multi-scale "
            "neighbor ordering is preserved exactly; lower is better."
        ),
        make=_make_gpmal2,
    ),
    "nrmse": FitnessSpec(
        fitness_id="nrmse",
        display_name="NRMSE",
        definition=(
            "NRMSE compares all pairwise Euclidean distances in the scaled "
            "original space against the corresponding distances in the "
            "embedding. It is the root-mean-square error between the two "
            "distance sets, divided by the range of the original distances. "
            "0 means the embedding reproduces every pairwise distance "
            "exactly; lower is better."
        ),
        make=_make_nrmse,
    ),
}

FITNESS_IDS = tuple(FITNESS_REGISTRY)


def make_fitness(fitness_id: str, scaled: np.ndarray) -> Callable[[np.ndarray], float]:
    """Build a fast embedding -> cost closure with tables precomputed."""
    try:
        spec = FITNESS_REGISTRY[fitness_id]
    except KeyError:
        raise ValueError(
            f"unknown fitness {fitness_id!r}; expected one of {', '.join(FITNESS_IDS)}"
        ) from None
    return spec.make(np.asarray(scaled, dtype=float))
