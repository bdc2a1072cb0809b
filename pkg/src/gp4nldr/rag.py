"""Flat vector store for retrieval-augmented explanations.

Documents are chunked with a sliding character window, embedded with a
deterministic hashed bag-of-words vectorizer, and searched exhaustively by
cosine similarity (a flat index: exact, no approximation). The vectorizer
is intentionally offline and reproducible; an external embedding provider
can be substituted behind the same contract.
"""

from __future__ import annotations

import json
import re
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Chunk",
    "VectorStore",
    "build_store",
    "chunk_documents",
    "load_store",
    "query_store",
    "save_store",
    "vectorize",
]

VECTOR_DIM = 4096
DEFAULT_CHUNK_CHARS = 1200
DEFAULT_OVERLAP_CHARS = 200

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _normalize_whitespace(text: str) -> str:
    return " ".join(text.split())


def chunk_documents(
    docs: list[tuple[str, str]],
    chunk_chars: int = DEFAULT_CHUNK_CHARS,
    overlap_chars: int = DEFAULT_OVERLAP_CHARS,
) -> list[tuple[str, str]]:
    """Sliding-window chunks of whitespace-normalized text.

    Windows advance by ``chunk_chars - overlap_chars``; a final short chunk
    is kept, so concatenating chunks with the overlap stripped reproduces
    the normalized text.
    """
    if not chunk_chars > overlap_chars >= 0:
        raise ValueError("need chunk_chars > overlap_chars >= 0")
    step = chunk_chars - overlap_chars
    chunks: list[tuple[str, str]] = []
    for doc_id, text in docs:
        normalized = _normalize_whitespace(text)
        if not normalized:
            continue
        for start in range(0, len(normalized), step):
            chunks.append((doc_id, normalized[start : start + chunk_chars]))
    return chunks


def vectorize(text: str) -> np.ndarray:
    """Hashed term-frequency vector (dim 4096), L2-normalized; zeros for empty text."""
    vec = np.zeros(VECTOR_DIM)
    for token in _TOKEN_RE.findall(text.lower()):
        vec[zlib.crc32(token.encode("utf-8")) % VECTOR_DIM] += 1.0
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    text: str
    vector: np.ndarray


@dataclass(frozen=True)
class VectorStore:
    """Immutable flat index: every query scans every chunk."""

    chunks: tuple[Chunk, ...]

    def __len__(self) -> int:
        return len(self.chunks)


def build_store(
    docs: list[tuple[str, str]],
    chunk_chars: int = DEFAULT_CHUNK_CHARS,
    overlap_chars: int = DEFAULT_OVERLAP_CHARS,
) -> VectorStore:
    chunks = tuple(
        Chunk(doc_id=doc_id, text=text, vector=vectorize(text))
        for doc_id, text in chunk_documents(docs, chunk_chars, overlap_chars)
    )
    return VectorStore(chunks=chunks)


def build_store_from_dir(
    directory: str | Path,
    chunk_chars: int = DEFAULT_CHUNK_CHARS,
    overlap_chars: int = DEFAULT_OVERLAP_CHARS,
) -> VectorStore:
    """Build a store from every .txt/.md file in a directory (sorted by name)."""
    directory = Path(directory)
    docs = [
        (path.name, path.read_text(encoding="utf-8"))
        for path in sorted(directory.glob("*"))
        if path.suffix.lower() in {".txt", ".md"} and path.is_file()
    ]
    return build_store(docs, chunk_chars, overlap_chars)


def query_store(store: VectorStore, question: str, top_k: int = 3) -> list[str]:
    """Exact cosine ranking over all chunks; ties keep insertion order."""
    if top_k <= 0 or not store.chunks:
        return []
    query = vectorize(question)
    sims = np.array([float(chunk.vector @ query) for chunk in store.chunks])
    order = np.argsort(-sims, kind="stable")
    return [store.chunks[i].text for i in order[:top_k]]


def save_store(store: VectorStore, path: str | Path) -> None:
    payload = {
        "vector_dim": VECTOR_DIM,
        "chunks": [
            {"doc_id": c.doc_id, "text": c.text, "vector": c.vector.tolist()}
            for c in store.chunks
        ],
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_store(path: str | Path) -> VectorStore:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    chunks = tuple(
        Chunk(
            doc_id=entry["doc_id"],
            text=entry["text"],
            vector=np.asarray(entry["vector"], dtype=float),
        )
        for entry in payload["chunks"]
    )
    return VectorStore(chunks=chunks)
