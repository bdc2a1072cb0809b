"""Regenerate the bundled example archives (wine, dermatology, coil20).

Each archive is produced by one seeded evolutionary run over the matching
built-in dataset and committed under src/gp4nldr/assets/examples/. Run:

    python scripts/generate_examples.py [wine|dermatology|coil20 ...]

With no arguments all three are rebuilt. The coil20 run (1000 generations
over 1440x1024 data) takes several minutes.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

from gp4nldr.archive import SessionArchive
from gp4nldr.datasets import coil20_dataset, dermatology_dataset, wine_dataset
from gp4nldr.evolution import BloatControl, RunConfig, run_experiment

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "gp4nldr" / "assets" / "examples"

EXAMPLES = {
    "wine": (
        wine_dataset,
        RunConfig(
            population_size=100,
            generations=100,
            final_dimensions=2,
            fitness_id="gpmal",
            bloat=BloatControl(method="lexicographic"),
            seed=42,
        ),
    ),
    "dermatology": (
        dermatology_dataset,
        RunConfig(
            population_size=100,
            generations=200,
            final_dimensions=3,
            fitness_id="gpmal2",
            bloat=BloatControl(method="lexicographic"),
            seed=7,
        ),
    ),
    "coil20": (
        coil20_dataset,
        RunConfig(
            population_size=100,
            generations=1000,
            final_dimensions=2,
            fitness_id="gpmal2",
            bloat=BloatControl(method="none"),
            seed=11,
        ),
    ),
}


def generate(name: str) -> None:
    make_dataset, config = EXAMPLES[name]
    dataset = make_dataset()
    started = time.time()
    last_report = [started]

    def progress(done: int, best: float) -> None:
        if time.time() - last_report[0] >= 15 or done == config.generations:
            last_report[0] = time.time()
            print(
                f"[{name}] generation {done}/{config.generations} "
                f"best={best:.6f} elapsed={time.time() - started:.0f}s",
                flush=True,
            )

    result = run_experiment(dataset, config, progress=progress)
    archive = SessionArchive(result=result)
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    path = OUT_DIR / f"{name}.json"
    path.write_bytes(archive.to_bytes())
    print(
        f"[{name}] done in {time.time() - started:.0f}s: "
        f"fitness={result.best_individual.fitness:.6f} "
        f"accuracy {result.accuracy_original:.4f} -> {result.accuracy_embedding:.4f} "
        f"({path})",
        flush=True,
    )


if __name__ == "__main__":
    names = sys.argv[1:] or list(EXAMPLES)
    for name in names:
        generate(name)
