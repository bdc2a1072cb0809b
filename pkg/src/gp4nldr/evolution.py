"""Generational evolution of tree forests, one tree per embedding dimension.

Selection is tournament-based with three optional bloat-control schemes:
lexicographic parsimony (smaller wins fitness ties), double tournament
(fitness and size tournaments composed in either order), and a Tarpeian
penalty (above-mean-size individuals get the worst fitness with some
probability before selection, without touching the recorded fitness).

Everything is driven by one ``random.Random`` seeded from the run config,
and individual evaluation is pure, so a run is reproducible bit-for-bit
regardless of how many evaluation workers are used.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .data import Dataset
from .fitness import FITNESS_IDS
from .trees import (
    Node,
    grow_tree,
    node_depth_at,
    render_expression,
    replace_subtree,
    subtree_at,
    tree_depth,
    tree_size,
    evaluate_columns,
)

__all__ = [
    "WORST_FITNESS",
    "BloatControl",
    "Individual",
    "RunConfig",
    "RunResult",
    "apply_tarpeian",
    "crossover",
    "evaluate_individual",
    "evolve",
    "init_population",
    "mutate",
    "run_experiment",
    "select_parent",
    "size_tournament",
]

WORST_FITNESS = math.inf

BLOAT_METHODS = ("none", "lexicographic", "double_tournament", "tarpeian")


@dataclass(frozen=True)
class BloatControl:
    """Bloat-control scheme plus its parameters.

    ``p_smaller`` is the probability the smaller finalist wins a size
    tournament (double tournament); ``p_tarpeian`` is the per-individual
    penalty probability (Tarpeian). Irrelevant parameters are ignored.
    """

    method: str = "none"
    order_fitness_first: bool = True
    p_smaller: float = 0.7
    p_tarpeian: float = 0.3

    def __post_init__(self):
        if self.method not in BLOAT_METHODS:
            raise ValueError(f"bloat method must be one of {BLOAT_METHODS}, got {self.method!r}")
        if not 0.0 <= self.p_smaller <= 1.0:
            raise ValueError(f"p_smaller must be in [0, 1], got {self.p_smaller}")
        if not 0.0 <= self.p_tarpeian <= 1.0:
            raise ValueError(f"p_tarpeian must be in [0, 1], got {self.p_tarpeian}")


@dataclass(frozen=True)
class RunConfig:
    """All parameters of one evolutionary run."""

    population_size: int = 100
    generations: int = 100
    final_dimensions: int = 2
    fitness_id: str = "gpmal"
    bloat: BloatControl = field(default_factory=BloatControl)
    seed: int = 0
    max_depth: int = 8
    tournament_size: int = 7
    crossover_rate: float = 0.8
    mutation_rate: float = 0.15
    elitism_count: int = 1

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError(f"population_size must be >= 1, got {self.population_size}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if self.final_dimensions < 1:
            raise ValueError(f"final_dimensions must be >= 1, got {self.final_dimensions}")
        if self.fitness_id not in FITNESS_IDS:
            raise ValueError(
                f"fitness_id must be one of {FITNESS_IDS}, got {self.fitness_id!r}"
            )
        for name in ("crossover_rate", "mutation_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {rate}")
        if self.crossover_rate + self.mutation_rate > 1.0 + 1e-12:
            raise ValueError("crossover_rate + mutation_rate must not exceed 1")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.tournament_size < 1:
            raise ValueError(f"tournament_size must be >= 1, got {self.tournament_size}")
        if not 0 <= self.elitism_count <= self.population_size:
            raise ValueError("elitism_count must be in [0, population_size]")


@dataclass
class Individual:
    """A forest of d trees plus its (minimized) fitness and total size."""

    trees: tuple[Node, ...]
    fitness: float | None = None
    size: int = -1

    def __post_init__(self):
        self.trees = tuple(self.trees)
        if self.size < 0:
            self.size = sum(tree_size(t) for t in self.trees)


@dataclass(frozen=True)
class RunResult:
    """Everything a run produces, ready for display and archiving."""

    config: RunConfig
    dataset_name: str
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]
    instance_labels: tuple[str, ...]
    expressions: tuple[str, ...]
    best_individual: Individual
    embedding: np.ndarray
    fitness_history: tuple[float, ...]
    accuracy_original: float | None = None
    accuracy_embedding: float | None = None


def evaluate_individual(ind: Individual, scaled: np.ndarray) -> np.ndarray:
    """Evaluate every tree over every row; returns the n x d embedding."""
    columns = np.ascontiguousarray(np.asarray(scaled, dtype=float).T)
    out = np.empty((columns.shape[1], len(ind.trees)))
    for j, tree in enumerate(ind.trees):
        out[:, j] = evaluate_columns(tree, columns)
    return out


def init_population(
    config: RunConfig, num_features: int, rng: random.Random
) -> list[Individual]:
    """Ramped half-and-half initialization, tree depths 2..6, terminals are features."""
    if num_features < 1:
        raise ValueError("need at least one feature")
    max_init_depth = min(6, config.max_depth)
    population = []
    for _ in range(config.population_size):
        trees = []
        for _ in range(config.final_dimensions):
            depth = rng.randint(2, max_init_depth)
            trees.append(
                grow_tree(
                    rng,
                    num_features,
                    depth,
                    min_depth=2,
                    full=rng.random() < 0.5,
                )
            )
        population.append(Individual(trees=tuple(trees)))
    return population


def _beats(a: Individual, b: Individual, *, lexicographic: bool) -> bool:
    """True when a strictly displaces incumbent b under the selection order."""
    if a.fitness != b.fitness:
        return a.fitness < b.fitness
    if a.fitness == WORST_FITNESS or lexicographic:
        return a.size < b.size  # sentinel ties and lexicographic ties prefer small
    return False


def _tournament_index(
    population: Sequence[Individual],
    size: int,
    rng: random.Random,
    *,
    lexicographic: bool,
) -> int:
    # contestants drawn without replacement, so a 2-candidate tournament over
    # a 2-individual population really compares the two
    contestants = rng.sample(range(len(population)), min(size, len(population)))
    best = contestants[0]
    for challenger in contestants[1:]:
        if _beats(population[challenger], population[best], lexicographic=lexicographic):
            best = challenger
    return best


def _size_duel(
    population: Sequence[Individual], i: int, j: int, p_smaller: float, rng: random.Random
) -> int:
    if population[i].size == population[j].size:
        return i if rng.random() < 0.5 else j
    small, large = (i, j) if population[i].size < population[j].size else (j, i)
    return small if rng.random() < p_smaller else large


def size_tournament(
    a: Individual, b: Individual, p_smaller: float, rng: random.Random
) -> Individual:
    """The size leg of a double tournament: smaller wins with probability p_smaller."""
    pair = (a, b)
    return pair[_size_duel(pair, 0, 1, p_smaller, rng)]


def _select_index(
    population: Sequence[Individual], config: RunConfig, rng: random.Random
) -> int:
    bloat = config.bloat
    if bloat.method == "lexicographic":
        return _tournament_index(
            population, config.tournament_size, rng, lexicographic=True
        )
    if bloat.method == "double_tournament":
        if bloat.order_fitness_first:
            a = _tournament_index(
                population, config.tournament_size, rng, lexicographic=False
            )
            b = _tournament_index(
                population, config.tournament_size, rng, lexicographic=False
            )
            return _size_duel(population, a, b, bloat.p_smaller, rng)
        qualifiers = [
            _size_duel(
                population,
                *(rng.sample(range(len(population)), 2) if len(population) > 1 else (0, 0)),
                bloat.p_smaller,
                rng,
            )
            for _ in range(config.tournament_size)
        ]
        best = qualifiers[0]
        for idx in qualifiers[1:]:
            if _beats(population[idx], population[best], lexicographic=False):
                best = idx
        return best
    # "none" and "tarpeian" both select by plain fitness tournament.
    return _tournament_index(population, config.tournament_size, rng, lexicographic=False)


def select_parent(
    population: Sequence[Individual], config: RunConfig, rng: random.Random
) -> Individual:
    """Pick one parent according to the configured tournament scheme."""
    return population[_select_index(population, config, rng)]


def apply_tarpeian(
    population: Sequence[Individual], p: float, rng: random.Random
) -> list[Individual]:
    """Return a selection view where oversized individuals may carry the worst fitness.

    Each individual whose size exceeds the population mean size is, with
    probability ``p``, replaced by a copy with sentinel fitness. Originals
    are never modified.
    """
    mean_size = sum(ind.size for ind in population) / len(population)
    out = []
    for ind in population:
        if ind.size > mean_size and rng.random() < p:
            out.append(Individual(trees=ind.trees, fitness=WORST_FITNESS, size=ind.size))
        else:
            out.append(ind)
    return out


def crossover(
    a: Individual, b: Individual, rng: random.Random, *, max_depth: int = 8
) -> tuple[Individual, Individual]:
    """Swap uniform-random subtrees within one uniformly chosen dimension.

    An offspring tree that would exceed ``max_depth`` is repaired by
    reverting to the corresponding parent tree.
    """
    if len(a.trees) != len(b.trees):
        raise ValueError("parents must have the same number of trees")
    dim = rng.randrange(len(a.trees))
    ta, tb = a.trees[dim], b.trees[dim]
    # one draw positions both points: uniform in each tree, and identical
    # trees pick identical points, so self-crossover is a semantic identity
    roll = rng.random()
    ia = min(int(roll * tree_size(ta)), tree_size(ta) - 1)
    ib = min(int(roll * tree_size(tb)), tree_size(tb) - 1)
    sub_a = subtree_at(ta, ia)
    sub_b = subtree_at(tb, ib)
    child_a = replace_subtree(ta, ia, sub_b)
    child_b = replace_subtree(tb, ib, sub_a)
    if tree_depth(child_a) > max_depth:
        child_a = ta
    if tree_depth(child_b) > max_depth:
        child_b = tb
    trees_a = a.trees[:dim] + (child_a,) + a.trees[dim + 1 :]
    trees_b = b.trees[:dim] + (child_b,) + b.trees[dim + 1 :]
    return Individual(trees=trees_a), Individual(trees=trees_b)


def mutate(
    ind: Individual,
    rng: random.Random,
    num_features: int,
    *,
    max_depth: int = 8,
    subtree_depth: int = 3,
) -> Individual:
    """Replace a uniform-random node with a freshly grown subtree (depth <= 3)."""
    dim = rng.randrange(len(ind.trees))
    tree = ind.trees[dim]
    index = rng.randrange(tree_size(tree))
    allowed = min(subtree_depth, max_depth - node_depth_at(tree, index))
    fresh = grow_tree(rng, num_features, max(0, allowed))
    mutated = replace_subtree(tree, index, fresh)
    trees = ind.trees[:dim] + (mutated,) + ind.trees[dim + 1 :]
    return Individual(trees=trees)


def _evaluate_population(
    population: list[Individual],
    scaled: np.ndarray,
    fitness_fn: Callable[[np.ndarray], float],
    workers: int,
) -> None:
    pending = [ind for ind in population if ind.fitness is None]

    def score(ind: Individual) -> float:
        return fitness_fn(evaluate_individual(ind, scaled))

    if workers > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for ind, fit in zip(pending, pool.map(score, pending)):
                ind.fitness = fit
    else:
        for ind in pending:
            ind.fitness = score(ind)


def _best_index(population: Sequence[Individual]) -> int:
    best = 0
    for i in range(1, len(population)):
        ind, inc = population[i], population[best]
        if ind.fitness < inc.fitness or (
            ind.fitness == inc.fitness and ind.size < inc.size
        ):
            best = i
    return best


def evolve(
    config: RunConfig,
    dataset: Dataset,
    fitness_fn: Callable[[np.ndarray], float],
    *,
    progress: Callable[[int, float], None] | None = None,
    workers: int = 1,
) -> RunResult:
    """Run the generational loop and return the best-ever individual's result.

    ``progress(generations_completed, best_fitness)`` is invoked once per
    generation. Deterministic for a fixed (config, dataset, seed), including
    across ``workers`` settings.
    """
    rng = random.Random(config.seed)
    scaled = dataset.scaled
    num_features = dataset.num_features

    population = init_population(config, num_features, rng)
    _evaluate_population(population, scaled, fitness_fn, workers)

    best_ever = population[_best_index(population)]
    history: list[float] = []

    for generation in range(config.generations):
        gen_best = population[_best_index(population)]
        if gen_best.fitness < best_ever.fitness or (
            gen_best.fitness == best_ever.fitness and gen_best.size < best_ever.size
        ):
            best_ever = gen_best
        history.append(best_ever.fitness)
        if progress is not None:
            progress(generation + 1, best_ever.fitness)

        elites = sorted(
            range(len(population)),
            key=lambda i: (population[i].fitness, population[i].size),
        )[: config.elitism_count]
        next_population = [population[i] for i in elites]

        selection_view = population
        if config.bloat.method == "tarpeian":
            selection_view = apply_tarpeian(population, config.bloat.p_tarpeian, rng)

        while len(next_population) < config.population_size:
            roll = rng.random()
            if roll < config.crossover_rate:
                i = _select_index(selection_view, config, rng)
                j = _select_index(selection_view, config, rng)
                child_a, child_b = crossover(
                    population[i], population[j], rng, max_depth=config.max_depth
                )
                next_population.append(child_a)
                if len(next_population) < config.population_size:
                    next_population.append(child_b)
            elif roll < config.crossover_rate + config.mutation_rate:
                i = _select_index(selection_view, config, rng)
                next_population.append(
                    mutate(population[i], rng, num_features, max_depth=config.max_depth)
                )
            else:
                i = _select_index(selection_view, config, rng)
                next_population.append(population[i])

        population = next_population
        _evaluate_population(population, scaled, fitness_fn, workers)

    final_best = population[_best_index(population)]
    if final_best.fitness < best_ever.fitness or (
        final_best.fitness == best_ever.fitness and final_best.size < best_ever.size
    ):
        best_ever = final_best

    embedding = evaluate_individual(best_ever, scaled)
    expressions = tuple(
        render_expression(tree, dataset.feature_names) for tree in best_ever.trees
    )
    return RunResult(
        config=config,
        dataset_name=dataset.name,
        feature_names=dataset.feature_names,
        class_names=dataset.class_names,
        instance_labels=dataset.labels,
        expressions=expressions,
        best_individual=best_ever,
        embedding=embedding,
        fitness_history=tuple(history),
    )


def run_experiment(
    dataset: Dataset,
    config: RunConfig,
    *,
    progress: Callable[[int, float], None] | None = None,
    workers: int = 1,
) -> RunResult:
    """Evolve an embedding, then attach the random-forest accuracy pair."""
    from .evaluate import ForestConfig, accuracy_pair
    from .fitness import make_fitness

    fitness_fn = make_fitness(config.fitness_id, dataset.scaled)
    result = evolve(config, dataset, fitness_fn, progress=progress, workers=workers)
    acc_original, acc_embedding = accuracy_pair(
        dataset, result.embedding, ForestConfig(seed=config.seed)
    )
    return replace(
        result, accuracy_original=acc_original, accuracy_embedding=acc_embedding
    )
