"""Bloat control schemes compared on one dataset.

Evolves the same Wine reduction under no bloat control, lexicographic
parsimony, double tournament, and the Tarpeian method, then compares the
best cost and the size of the winning forest. Parsimony schemes should
land near the unconstrained cost with visibly smaller trees.
"""

from gp4nldr import BloatControl, RunConfig, run_experiment, wine_dataset

dataset = wine_dataset()

schemes = {
    "none": BloatControl(method="none"),
    "lexicographic": BloatControl(method="lexicographic"),
    "double tournament": BloatControl(method="double_tournament", p_smaller=0.8),
    "tarpeian (p=0.3)": BloatControl(method="tarpeian", p_tarpeian=0.3),
}

print(f"{'scheme':20s} {'best cost':>10s} {'forest size':>12s}")
for label, bloat in schemes.items():
    config = RunConfig(
        population_size=60,
        generations=40,
        final_dimensions=2,
        fitness_id="gpmal",
        bloat=bloat,
        seed=7,
    )
    result = run_experiment(dataset, config)
    print(
        f"{label:20s} {result.best_individual.fitness:10.4f} "
        f"{result.best_individual.size:12d}"
    )
