import math
import random

import numpy as np
import pytest

from gp4nldr.data import Dataset
from gp4nldr.evolution import (
    WORST_FITNESS,
    BloatControl,
    Individual,
    RunConfig,
    apply_tarpeian,
    crossover,
    evaluate_individual,
    evolve,
    init_population,
    mutate,
    run_experiment,
    select_parent,
    size_tournament,
)
from gp4nldr.fitness import make_fitness
from gp4nldr.trees import Node, grow_tree, tree_depth, tree_size, validate_tree


def individual(fitness, size, num_trees=1):
    """A dummy individual whose trees are irrelevant to selection."""
    ind = Individual(trees=tuple(Node(0) for _ in range(num_trees)))
    ind.fitness = fitness
    ind.size = size
    return ind


def tiny_dataset(n=12, m=4, seed=0):
    rng = np.random.default_rng(seed)
    rows = rng.uniform(0, 1, (n, m))
    labels = tuple("ab"[i % 2] for i in range(n))
    return Dataset(name="toy", feature_names=tuple(f"f{i}" for i in range(m)),
                   rows=rows, labels=labels)


class TestRunConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            RunConfig(final_dimensions=0)
        with pytest.raises(ValueError):
            RunConfig(population_size=0)
        with pytest.raises(ValueError):
            RunConfig(crossover_rate=0.9, mutation_rate=0.2)
        with pytest.raises(ValueError):
            RunConfig(fitness_id="nope")
        with pytest.raises(ValueError):
            BloatControl(method="hoist")
        with pytest.raises(ValueError):
            BloatControl(p_smaller=1.5)

    def test_defaults_follow_first_case_study(self):
        cfg = RunConfig()
        assert cfg.population_size == 100
        assert cfg.generations == 100
        assert cfg.final_dimensions == 2
        assert cfg.fitness_id == "gpmal"


class TestEvaluateIndividual:
    def test_single_terminal_tree_copies_column(self, wine):
        idx = list(wine.feature_names).index("flavanoids")
        ind = Individual(trees=(Node(idx),))
        emb = evaluate_individual(ind, wine.scaled)
        assert np.array_equal(emb[:, 0], wine.scaled[:, idx])

    def test_two_terminal_trees_copy_first_columns(self):
        ds = tiny_dataset()
        ind = Individual(trees=(Node(0), Node(1)))
        emb = evaluate_individual(ind, ds.scaled)
        assert np.array_equal(emb, ds.scaled[:, :2])

    def test_matches_hand_evaluation(self):
        tree = Node("add", (Node(0), Node(1)))
        rows = np.array([[0.0, 0.1], [0.2, 0.3], [0.5, 0.5], [1.0, 0.0]])
        ind = Individual(trees=(tree,))
        emb = evaluate_individual(ind, rows)
        assert np.allclose(emb[:, 0], rows[:, 0] + rows[:, 1])

    def test_embeddings_are_finite(self):
        rng = random.Random(5)
        ds = tiny_dataset()
        for _ in range(100):
            trees = tuple(grow_tree(rng, 4, rng.randint(2, 8)) for _ in range(2))
            emb = evaluate_individual(Individual(trees=trees), ds.scaled)
            assert np.isfinite(emb).all()


class TestInitPopulation:
    def test_contract(self):
        cfg = RunConfig(population_size=100, final_dimensions=2)
        pop = init_population(cfg, 5, random.Random(0))
        assert len(pop) == 100
        for ind in pop:
            assert len(ind.trees) == 2
            for tree in ind.trees:
                assert 2 <= tree_depth(tree) <= 6
                validate_tree(tree, 5, max_depth=cfg.max_depth)

    def test_same_seed_same_population(self):
        cfg = RunConfig(population_size=30)
        a = init_population(cfg, 7, random.Random(42))
        b = init_population(cfg, 7, random.Random(42))
        assert [ind.trees for ind in a] == [ind.trees for ind in b]

    def test_single_individual(self):
        cfg = RunConfig(population_size=1, final_dimensions=3)
        (ind,) = init_population(cfg, 2, random.Random(1))
        assert len(ind.trees) == 3
        assert ind.size == sum(tree_size(t) for t in ind.trees)


class TestSelection:
    def test_lexicographic_prefers_smaller_on_tie(self):
        pop = [individual(0.5, 9), individual(0.5, 5)]
        cfg = RunConfig(bloat=BloatControl(method="lexicographic"), tournament_size=2)
        rng = random.Random(0)
        for _ in range(200):
            winner = select_parent(pop, cfg, rng)
            assert winner.size == 5

    def test_plain_tournament_picks_best_fitness(self):
        pop = [individual(0.9, 3), individual(0.1, 50), individual(0.5, 2)]
        cfg = RunConfig(bloat=BloatControl(method="none"), tournament_size=30)
        rng = random.Random(0)
        # tournament of 30 draws over 3 candidates: best is virtually always drawn
        for _ in range(50):
            assert select_parent(pop, cfg, rng).fitness == 0.1

    def test_size_tournament_p1_always_picks_strictly_smaller(self):
        rng = random.Random(1)
        for _ in range(500):
            small, large = individual(0.2, 4), individual(0.2, 12)
            assert size_tournament(small, large, 1.0, rng) is small
            assert size_tournament(large, small, 1.0, rng) is small

    def test_double_tournament_p1_prefers_small_overall(self):
        pop = [individual(0.2, 12), individual(0.2, 4)]
        cfg = RunConfig(
            bloat=BloatControl(method="double_tournament", p_smaller=1.0),
            tournament_size=3,
        )
        rng = random.Random(1)
        picks = [select_parent(pop, cfg, rng).size for _ in range(2000)]
        # the large one can only win when both fitness finalists are itself
        assert picks.count(4) > picks.count(12) * 2

    def test_double_tournament_size_first_orders_correctly(self):
        pop = [individual(0.9, 2), individual(0.1, 40)]
        cfg = RunConfig(
            bloat=BloatControl(
                method="double_tournament", p_smaller=1.0, order_fitness_first=False
            ),
            tournament_size=4,
        )
        rng = random.Random(2)
        # size duels with p=1 always qualify the small individual, so the
        # final fitness tournament only ever sees it
        for _ in range(200):
            assert select_parent(pop, cfg, rng).size == 2

    def test_sentinel_ties_break_by_size(self):
        pop = [individual(WORST_FITNESS, 20), individual(WORST_FITNESS, 3)]
        cfg = RunConfig(bloat=BloatControl(method="none"), tournament_size=4)
        rng = random.Random(3)
        for _ in range(100):
            assert select_parent(pop, cfg, rng).size == 3


class TestTarpeian:
    def test_p_zero_changes_nothing(self):
        pop = [individual(0.1, s) for s in (3, 3, 30)]
        out = apply_tarpeian(pop, 0.0, random.Random(0))
        assert out == pop
        assert all(o is p for o, p in zip(out, pop))

    def test_p_one_penalizes_exactly_above_mean(self):
        pop = [individual(0.1, 3), individual(0.2, 3), individual(0.3, 30)]
        out = apply_tarpeian(pop, 1.0, random.Random(0))
        assert out[0].fitness == 0.1
        assert out[1].fitness == 0.2
        assert out[2].fitness == WORST_FITNESS
        # originals untouched
        assert pop[2].fitness == 0.3

    def test_exactly_mean_size_is_not_penalized(self):
        pop = [individual(0.1, 4), individual(0.2, 4), individual(0.3, 4)]
        out = apply_tarpeian(pop, 1.0, random.Random(0))
        assert [o.fitness for o in out] == [0.1, 0.2, 0.3]

    def test_monte_carlo_rate(self):
        # 10,000 above-mean individuals plus one tiny one to set the mean low
        pop = [individual(0.5, 100) for _ in range(10_000)] + [individual(0.5, 1)]
        out = apply_tarpeian(pop, 0.5, random.Random(1234))
        penalized = sum(1 for ind in out[:-1] if ind.fitness == WORST_FITNESS)
        assert 0.48 <= penalized / 10_000 <= 0.52


class TestCrossover:
    def test_single_terminal_parents_swap(self):
        a = Individual(trees=(Node(0),))
        b = Individual(trees=(Node(1),))
        ca, cb = crossover(a, b, random.Random(0))
        assert ca.trees[0] == Node(1)
        assert cb.trees[0] == Node(0)

    def test_depth_never_exceeds_max(self):
        rng = random.Random(9)
        for _ in range(1000):
            trees_a = (grow_tree(rng, 4, rng.randint(2, 8)),)
            trees_b = (grow_tree(rng, 4, rng.randint(2, 8)),)
            ca, cb = crossover(
                Individual(trees=trees_a), Individual(trees=trees_b), rng, max_depth=8
            )
            assert tree_depth(ca.trees[0]) <= 8
            assert tree_depth(cb.trees[0]) <= 8
            validate_tree(ca.trees[0], 4)
            validate_tree(cb.trees[0], 4)

    def test_self_crossover_is_semantically_identity(self):
        rng = random.Random(10)
        data = np.random.default_rng(0).uniform(0, 1, (16, 3))
        for _ in range(50):
            ind = Individual(trees=(grow_tree(rng, 3, 4, min_depth=2),))
            ca, cb = crossover(ind, ind, rng)
            base = evaluate_individual(ind, data)
            assert np.allclose(evaluate_individual(ca, data), base)
            assert np.allclose(evaluate_individual(cb, data), base)

    def test_only_one_dimension_touched(self):
        rng = random.Random(11)
        a = Individual(trees=(Node(0), Node(1), Node(2)))
        b = Individual(trees=(Node(3), Node(0), Node(1)))
        ca, cb = crossover(a, b, rng)
        differing = [
            d for d in range(3) if ca.trees[d] != a.trees[d] or cb.trees[d] != b.trees[d]
        ]
        assert len(differing) == 1


class TestMutate:
    def test_single_terminal_becomes_small_tree(self):
        rng = random.Random(12)
        ind = Individual(trees=(Node(0),))
        out = mutate(ind, rng, num_features=4)
        assert tree_depth(out.trees[0]) <= 3
        validate_tree(out.trees[0], 4)

    def test_validity_preserved_over_many_mutations(self):
        rng = random.Random(13)
        ind = Individual(trees=(grow_tree(rng, 5, 6, min_depth=2),
                                grow_tree(rng, 5, 6, min_depth=2)))
        for _ in range(1000):
            ind = mutate(ind, rng, num_features=5, max_depth=8)
            for tree in ind.trees:
                assert tree_depth(tree) <= 8
                validate_tree(tree, 5)

    def test_determinism(self):
        ind = Individual(trees=(Node(0), Node(1)))
        a = mutate(ind, random.Random(77), num_features=6)
        b = mutate(ind, random.Random(77), num_features=6)
        assert a.trees == b.trees


class TestEvolve:
    def test_single_generation_contract(self):
        ds = tiny_dataset()
        cfg = RunConfig(population_size=2, generations=1, final_dimensions=1,
                        fitness_id="gpmal", seed=5)
        fitness_fn = make_fitness("gpmal", ds.scaled)
        rng = random.Random(cfg.seed)
        init = init_population(cfg, ds.num_features, rng)
        expected = min(
            fitness_fn(evaluate_individual(ind, ds.scaled)) for ind in init
        )
        result = evolve(cfg, ds, fitness_fn)
        assert len(result.fitness_history) == 1
        assert result.fitness_history[0] == expected

    def test_history_monotone_non_increasing(self):
        ds = tiny_dataset(n=20, m=5, seed=3)
        cfg = RunConfig(population_size=20, generations=30, final_dimensions=2,
                        fitness_id="gpmal",
                        bloat=BloatControl(method="lexicographic"), seed=8)
        result = evolve(cfg, ds, make_fitness("gpmal", ds.scaled))
        hist = result.fitness_history
        assert len(hist) == 30
        assert all(hist[i + 1] <= hist[i] for i in range(len(hist) - 1))
        assert result.best_individual.fitness <= hist[-1]

    def test_monotone_under_tarpeian(self):
        ds = tiny_dataset(n=16, m=4, seed=4)
        cfg = RunConfig(population_size=16, generations=20, final_dimensions=1,
                        fitness_id="nrmse",
                        bloat=BloatControl(method="tarpeian", p_tarpeian=0.8), seed=9)
        result = evolve(cfg, ds, make_fitness("nrmse", ds.scaled))
        hist = result.fitness_history
        assert all(hist[i + 1] <= hist[i] for i in range(len(hist) - 1))

    def test_deterministic_given_seed(self):
        ds = tiny_dataset(n=14, m=4, seed=6)
        cfg = RunConfig(population_size=12, generations=8, final_dimensions=2,
                        fitness_id="gpmal2", seed=123)
        r1 = evolve(cfg, ds, make_fitness("gpmal2", ds.scaled))
        r2 = evolve(cfg, ds, make_fitness("gpmal2", ds.scaled))
        assert r1.expressions == r2.expressions
        assert r1.fitness_history == r2.fitness_history
        assert np.array_equal(r1.embedding, r2.embedding)

    def test_workers_do_not_change_result(self):
        ds = tiny_dataset(n=14, m=4, seed=6)
        cfg = RunConfig(population_size=10, generations=6, final_dimensions=2,
                        fitness_id="gpmal", seed=321)
        fitness_fn = make_fitness("gpmal", ds.scaled)
        r1 = evolve(cfg, ds, fitness_fn, workers=1)
        r4 = evolve(cfg, ds, fitness_fn, workers=4)
        assert r1.expressions == r4.expressions
        assert r1.fitness_history == r4.fitness_history
        assert np.array_equal(r1.embedding, r4.embedding)

    def test_run_experiment_fills_accuracies(self):
        ds = tiny_dataset(n=30, m=4, seed=2)
        cfg = RunConfig(population_size=8, generations=3, final_dimensions=1,
                        fitness_id="nrmse", seed=1)
        result = run_experiment(ds, cfg)
        assert 0.0 <= result.accuracy_original <= 1.0
        assert 0.0 <= result.accuracy_embedding <= 1.0
        assert result.dataset_name == "toy"
        assert len(result.expressions) == 1

    def test_progress_callback_sees_every_generation(self):
        ds = tiny_dataset()
        cfg = RunConfig(population_size=6, generations=5, final_dimensions=1,
                        fitness_id="gpmal", seed=3)
        seen = []
        evolve(cfg, ds, make_fitness("gpmal", ds.scaled),
               progress=lambda done, best: seen.append((done, best)))
        assert [done for done, _ in seen] == [1, 2, 3, 4, 5]
        assert all(math.isfinite(best) for _, best in seen)
