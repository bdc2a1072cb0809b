"""Evolved-tree dimensionality reduction with conversational explanations.

One expression tree is evolved per embedding dimension against a
structure-preservation cost; results are scored with random-forest
cross-validation and explained through a prompt-engineered,
retrieval-augmented chat layer. See README.md for a tour.
"""

from .data import Dataset, DatasetError, assign_feature_names, load_csv, scale_minmax
from .datasets import coil20_dataset, dermatology_dataset, wine_dataset
from .evaluate import ForestConfig, accuracy_pair, cv_accuracy
from .evolution import (
    BloatControl,
    Individual,
    RunConfig,
    RunResult,
    crossover,
    evolve,
    init_population,
    mutate,
    run_experiment,
    select_parent,
)
from .fitness import (
    FITNESS_IDS,
    NeighborTable,
    build_neighbor_table,
    gpmal2_cost,
    gpmal_cost,
    make_fitness,
    nrmse_cost,
)
from .trees import Node, evaluate_tree, parse_expression, render_expression
from .explain import (
    ChatSession,
    INITIAL_QUESTION,
    advance_session,
    build_prompt,
    detect_keywords,
)
from .rag import VectorStore, build_store, chunk_documents, query_store, vectorize
from .archive import SessionArchive

__version__ = "0.1.0"

__all__ = [
    "BloatControl",
    "ChatSession",
    "Dataset",
    "DatasetError",
    "FITNESS_IDS",
    "ForestConfig",
    "INITIAL_QUESTION",
    "Individual",
    "NeighborTable",
    "Node",
    "RunConfig",
    "RunResult",
    "SessionArchive",
    "VectorStore",
    "accuracy_pair",
    "advance_session",
    "assign_feature_names",
    "build_neighbor_table",
    "build_prompt",
    "build_store",
    "chunk_documents",
    "coil20_dataset",
    "crossover",
    "cv_accuracy",
    "dermatology_dataset",
    "detect_keywords",
    "evaluate_tree",
    "evolve",
    "gpmal2_cost",
    "gpmal_cost",
    "init_population",
    "load_csv",
    "make_fitness",
    "mutate",
    "nrmse_cost",
    "parse_expression",
    "query_store",
    "render_expression",
    "run_experiment",
    "scale_minmax",
    "select_parent",
    "vectorize",
    "wine_dataset",
]
