"""Prompt assembly and conversational sessions for explaining run results.

The prompt is built from an editable text template with twelve sections in
a fixed order: context preamble, fitness definition, operator glossary,
dataset and parameters, feature list (or a compact range when the dataset
has more than 40 features), per-dimension expressions, the accuracy pair,
the word limit, response guidance, an optional retrieved-background slot,
the opening question, and the dialogue history. Only metadata is ever
injected; dataset row values never reach the prompt.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Callable

from .evolution import RunResult
from .rag import (
    DEFAULT_CHUNK_CHARS,
    DEFAULT_OVERLAP_CHARS,
    VectorStore,
    query_store,
)
from .trees import OPERATOR_NOTES

__all__ = [
    "DEFAULT_KEYWORDS",
    "DEFAULT_TOP_K",
    "DEFAULT_WORD_LIMIT",
    "FEATURE_LIST_LIMIT",
    "INITIAL_QUESTION",
    "PART_MARKERS",
    "ChatSession",
    "Message",
    "PromptTemplate",
    "RagSettings",
    "advance_session",
    "build_prompt",
    "detect_keywords",
    "load_rag_settings",
]

INITIAL_QUESTION = "Provide an exciting summary of the results"
DEFAULT_WORD_LIMIT = 80
FEATURE_LIST_LIMIT = 40
DEFAULT_TOP_K = 3

DEFAULT_KEYWORDS = (
    "gp-mal",
    "gpmal",
    "gpmal2",
    "gp-mal2",
    "gp-mal-2",
    "tarp",
    "lexi",
    "tourn",
    "umap",
    "nrmse",
)

# One distinctive phrase per template part (a)-(l), in order. Template
# validation and the golden tests both key off these.
PART_MARKERS = {
    "a": "helping a user interpret the results of an evolutionary",
    "b": "Fitness function used:",
    "c": "The operators that may appear in the expressions",
    "d": "with these parameters:",
    "e": "Dataset features:",
    "f": "produced by these expressions:",
    "g": "scored the original dataset at",
    "h": "words or fewer",
    "i": "do not repeat this prompt back",
    "j": "Relevant background information:",
    "k": "The conversation opened with the request:",
    "l": "Conversation so far:",
}

_RAG_HEADER = PART_MARKERS["j"]


@dataclass(frozen=True)
class PromptTemplate:
    """The editable prompt skeleton; placeholders are filled by build_prompt."""

    text: str

    @classmethod
    def load_default(cls) -> "PromptTemplate":
        text = (
            resources.files("gp4nldr")
            .joinpath("assets/prompt_template.txt")
            .read_text(encoding="utf-8")
        )
        return cls(text=text)

    def validate(self) -> None:
        """Check the non-injected parts appear, in (a)-(l) order."""
        # (b), (e)-(g) and (j)-(l) markers enter via injected blocks.
        injected = {"b": "{fitness_block}", "e": "{feature_section}",
                    "f": "{expression_block}", "g": "{accuracy_block}",
                    "j": "{rag_block}", "k": "{opening_block}", "l": "{dialogue_block}"}
        position = -1
        for part, marker in PART_MARKERS.items():
            needle = injected.get(part, marker)
            found = self.text.find(needle)
            if found < 0:
                raise ValueError(f"prompt template is missing part ({part})")
            if found < position:
                raise ValueError(f"prompt template part ({part}) is out of order")
            position = found


@dataclass(frozen=True)
class Message:
    role: str  # "human" | "ai"
    text: str
    timestamp: str


@dataclass
class ChatSession:
    """One conversation bound to a run result.

    Roles strictly alternate, starting with the human's opening question.
    """

    run_ref: str
    word_limit: int = DEFAULT_WORD_LIMIT
    model_id: str = "gpt-3.5-turbo"
    keyword_list: tuple[str, ...] = DEFAULT_KEYWORDS
    messages: list[Message] = field(default_factory=list)

    def __post_init__(self):
        if self.word_limit < 1:
            raise ValueError(f"word_limit must be >= 1, got {self.word_limit}")
        self.keyword_list = tuple(k.lower() for k in self.keyword_list)

    def append(self, role: str, text: str, timestamp: str) -> None:
        expected = "human" if len(self.messages) % 2 == 0 else "ai"
        if role != expected:
            raise ValueError(f"expected a {expected!r} message, got {role!r}")
        self.messages.append(Message(role=role, text=text, timestamp=timestamp))


def detect_keywords(question: str, keywords) -> list[str]:
    """Case-insensitive substring match; returns the fragments that hit."""
    lowered = question.lower()
    return [k for k in keywords if k.lower() in lowered]


def _feature_section(feature_names: tuple[str, ...]) -> str:
    m = len(feature_names)
    if m > FEATURE_LIST_LIMIT:
        return (
            f"{PART_MARKERS['e']} f0 to f{m - 1} "
            f"(a dataset with {m} features; individual names omitted)."
        )
    return f"{PART_MARKERS['e']} {', '.join(feature_names)}."


def _parameter_summary(result: RunResult) -> str:
    cfg = result.config
    bloat = cfg.bloat.method.replace("_", " ")
    return (
        f"population size {cfg.population_size}, generations {cfg.generations}, "
        f"final dimensions {cfg.final_dimensions}, bloat control {bloat}, "
        f"random seed {cfg.seed}"
    )


def _dialogue_block(session: ChatSession, question: str | None) -> str:
    lines = [PART_MARKERS["l"]]
    for message in session.messages:
        speaker = "Human" if message.role == "human" else "AI"
        lines.append(f"{speaker}: {message.text}")
    if question is not None:
        lines.append(f"Human: {question}")
    lines.append("AI:")
    return "\n".join(lines)


def build_prompt(
    result: RunResult,
    session: ChatSession,
    retrieved: list[str] | None = None,
    *,
    question: str | None = None,
    template: PromptTemplate | None = None,
) -> str:
    """Assemble the full prompt for one exchange.

    ``question`` is the pending human turn (not yet recorded in the
    session); the retrieved-background section appears only when
    ``retrieved`` is non-empty.
    """
    from .fitness import FITNESS_REGISTRY

    if result.accuracy_original is None or result.accuracy_embedding is None:
        raise ValueError("result is incomplete: accuracy pair missing")
    template = template or PromptTemplate.load_default()
    template.validate()

    spec = FITNESS_REGISTRY[result.config.fitness_id]
    fitness_block = f"{PART_MARKERS['b']} {spec.display_name}. {spec.definition}"
    operator_notes = "\n".join(f"- {note}" for note in OPERATOR_NOTES.values())
    expression_block = "\n".join(
        [
            f"The embedding has {len(result.expressions)} dimension(s), "
            f"{PART_MARKERS['f']}"
        ]
        + [
            f"dimension {i + 1}: {expression}"
            for i, expression in enumerate(result.expressions)
        ]
    )
    accuracy_block = (
        f"A random forest classifier with 10-fold cross-validation "
        f"{PART_MARKERS['g']} {result.accuracy_original:.4f} accuracy and the "
        f"reduced embedding at {result.accuracy_embedding:.4f} accuracy."
    )
    rag_block = ""
    if retrieved:
        chunk_lines = "\n".join(f"- {chunk}" for chunk in retrieved)
        rag_block = f"{_RAG_HEADER}\n{chunk_lines}\n\n"
    opening_block = f'{PART_MARKERS["k"]} "{INITIAL_QUESTION}"'

    return template.text.format(
        fitness_block=fitness_block,
        operator_notes=operator_notes,
        dataset_name=result.dataset_name,
        parameter_summary=_parameter_summary(result),
        feature_section=_feature_section(result.feature_names),
        expression_block=expression_block,
        accuracy_block=accuracy_block,
        word_limit=session.word_limit,
        rag_block=rag_block,
        opening_block=opening_block,
        dialogue_block=_dialogue_block(session, question),
    )


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def advance_session(
    session: ChatSession,
    question: str | None,
    store: VectorStore | None,
    result: RunResult,
    llm,
    *,
    top_k: int = DEFAULT_TOP_K,
    template: PromptTemplate | None = None,
    clock: Callable[[], str] = _utc_now,
) -> str:
    """Run one exchange: retrieve if keywords hit, prompt, record, answer.

    A fresh session with ``question=None`` asks the opening question. On
    provider failure the session is left unmodified and the error
    propagates.
    """
    if question is None:
        if session.messages:
            raise ValueError("a follow-up question is required once the session has started")
        question = INITIAL_QUESTION

    retrieved: list[str] = []
    if store is not None and detect_keywords(question, session.keyword_list):
        retrieved = query_store(store, question, top_k=top_k)

    prompt = build_prompt(
        result, session, retrieved, question=question, template=template
    )
    answer = llm.complete([("human", prompt)])
    session.append("human", question, clock())
    session.append("ai", answer, clock())
    return answer


@dataclass(frozen=True)
class RagSettings:
    """Keyword list and chunking parameters, loadable from a JSON file."""

    keywords: tuple[str, ...] = DEFAULT_KEYWORDS
    chunk_chars: int = DEFAULT_CHUNK_CHARS
    overlap_chars: int = DEFAULT_OVERLAP_CHARS
    top_k: int = DEFAULT_TOP_K


def load_rag_settings(path: str | Path | None = None) -> RagSettings:
    """Read settings from a JSON file; missing keys fall back to defaults."""
    if path is None:
        raw = (
            resources.files("gp4nldr")
            .joinpath("assets/rag_config.json")
            .read_text(encoding="utf-8")
        )
    else:
        raw = Path(path).read_text(encoding="utf-8")
    data = json.loads(raw)
    defaults = RagSettings()
    return RagSettings(
        keywords=tuple(data.get("keywords", defaults.keywords)),
        chunk_chars=int(data.get("chunk_chars", defaults.chunk_chars)),
        overlap_chars=int(data.get("overlap_chars", defaults.overlap_chars)),
        top_k=int(data.get("top_k", defaults.top_k)),
    )
