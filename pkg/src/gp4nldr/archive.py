"""Download/reload format for run results and chat transcripts.

A session archive is a single JSON document (format_version "1") holding
the run configuration, dataset metadata (names only, never rows), the
rendered expressions, the embedding, the accuracy pair, the fitness
history, and the chat transcript. Expressions round-trip through the tree
parser, so an imported archive can rebuild the best individual exactly.
API keys are never part of an archive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .evolution import BloatControl, Individual, RunConfig, RunResult
from .explain import ChatSession, Message
from .trees import parse_expression

__all__ = [
    "ArchiveError",
    "FORMAT_VERSION",
    "SessionArchive",
    "VersionMismatch",
]

FORMAT_VERSION = "1"


class ArchiveError(ValueError):
    """The payload is not a valid session archive."""


class VersionMismatch(ArchiveError):
    """The payload's format_version is not supported."""


@dataclass(frozen=True)
class SessionArchive:
    """Everything needed to reload a run and continue its conversation."""

    result: RunResult
    word_limit: int = 80
    model_id: str = "gpt-3.5-turbo"
    messages: tuple[Message, ...] = ()
    format_version: str = FORMAT_VERSION

    @classmethod
    def from_session(cls, result: RunResult, session: ChatSession) -> "SessionArchive":
        return cls(
            result=result,
            word_limit=session.word_limit,
            model_id=session.model_id,
            messages=tuple(session.messages),
        )

    def to_session(self, run_ref: str) -> ChatSession:
        session = ChatSession(
            run_ref=run_ref, word_limit=self.word_limit, model_id=self.model_id
        )
        for message in self.messages:
            session.append(message.role, message.text, message.timestamp)
        return session

    def to_dict(self) -> dict:
        result = self.result
        cfg = result.config
        return {
            "format_version": self.format_version,
            "config": {
                "population_size": cfg.population_size,
                "generations": cfg.generations,
                "final_dimensions": cfg.final_dimensions,
                "fitness_id": cfg.fitness_id,
                "bloat": {
                    "method": cfg.bloat.method,
                    "order_fitness_first": cfg.bloat.order_fitness_first,
                    "p_smaller": cfg.bloat.p_smaller,
                    "p_tarpeian": cfg.bloat.p_tarpeian,
                },
                "seed": cfg.seed,
                "max_depth": cfg.max_depth,
                "tournament_size": cfg.tournament_size,
                "crossover_rate": cfg.crossover_rate,
                "mutation_rate": cfg.mutation_rate,
                "elitism_count": cfg.elitism_count,
            },
            "dataset": {
                "name": result.dataset_name,
                "feature_names": list(result.feature_names),
                "class_names": list(result.class_names),
                "instance_labels": list(result.instance_labels),
                "num_features": len(result.feature_names),
                "num_instances": len(result.instance_labels),
            },
            "expressions": list(result.expressions),
            "best_fitness": result.best_individual.fitness,
            "embedding": [[float(v) for v in row] for row in result.embedding],
            "accuracies": {
                "original": result.accuracy_original,
                "embedding": result.accuracy_embedding,
            },
            "fitness_history": list(result.fitness_history),
            "chat": {
                "word_limit": self.word_limit,
                "model_id": self.model_id,
                "messages": [
                    {"role": m.role, "text": m.text, "timestamp": m.timestamp}
                    for m in self.messages
                ],
            },
        }

    def to_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), indent=2).encode("utf-8")

    @classmethod
    def from_dict(cls, data: dict) -> "SessionArchive":
        if not isinstance(data, dict):
            raise ArchiveError("archive payload must be a JSON object")
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise VersionMismatch(
                f"unsupported archive format_version {version!r}; expected {FORMAT_VERSION!r}"
            )
        try:
            cfg_data = data["config"]
            bloat_data = cfg_data["bloat"]
            config = RunConfig(
                population_size=cfg_data["population_size"],
                generations=cfg_data["generations"],
                final_dimensions=cfg_data["final_dimensions"],
                fitness_id=cfg_data["fitness_id"],
                bloat=BloatControl(
                    method=bloat_data["method"],
                    order_fitness_first=bloat_data["order_fitness_first"],
                    p_smaller=bloat_data["p_smaller"],
                    p_tarpeian=bloat_data["p_tarpeian"],
                ),
                seed=cfg_data["seed"],
                max_depth=cfg_data["max_depth"],
                tournament_size=cfg_data["tournament_size"],
                crossover_rate=cfg_data["crossover_rate"],
                mutation_rate=cfg_data["mutation_rate"],
                elitism_count=cfg_data["elitism_count"],
            )
            ds = data["dataset"]
            feature_names = tuple(ds["feature_names"])
            expressions = tuple(data["expressions"])
            trees = tuple(
                parse_expression(expr, feature_names) for expr in expressions
            )
            best = Individual(trees=trees, fitness=data["best_fitness"])
            embedding = np.asarray(data["embedding"], dtype=float)
            chat = data.get("chat", {})
            messages = tuple(
                Message(role=m["role"], text=m["text"], timestamp=m["timestamp"])
                for m in chat.get("messages", [])
            )
            result = RunResult(
                config=config,
                dataset_name=ds["name"],
                feature_names=feature_names,
                class_names=tuple(ds["class_names"]),
                instance_labels=tuple(ds["instance_labels"]),
                expressions=expressions,
                best_individual=best,
                embedding=embedding,
                fitness_history=tuple(data["fitness_history"]),
                accuracy_original=data["accuracies"]["original"],
                accuracy_embedding=data["accuracies"]["embedding"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ArchiveError):
                raise
            raise ArchiveError(f"invalid archive payload: {exc}") from exc
        return cls(
            result=result,
            word_limit=chat.get("word_limit", 80),
            model_id=chat.get("model_id", "gpt-3.5-turbo"),
            messages=messages,
        )

    @classmethod
    def from_bytes(cls, payload: bytes | str) -> "SessionArchive":
        try:
            data = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise ArchiveError(f"archive is not valid JSON: {exc}") from exc
        return cls.from_dict(data)
