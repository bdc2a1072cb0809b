"""Regenerate the committed golden prompt files under tests/golden/.

Each golden is the exact prompt produced for one bundled example archive
and one fixed question; the acceptance suite rebuilds them and compares
byte-for-byte. Run after regenerating the example archives.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from gp4nldr.archive import SessionArchive
from gp4nldr.explain import build_prompt, detect_keywords, load_rag_settings
from gp4nldr.rag import build_store_from_dir, query_store

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "golden"

# (archive id, question) -> golden file; the wine question carries keywords
# so its prompt exercises the retrieval slot, the coil20 one does not
CASES = {
    "wine_prompt.txt": ("wine", "Is GP-MaL better than GP-MaL-2?"),
    "coil20_prompt.txt": ("coil20", "What makes a feature important?"),
}


def build_golden(example_id: str, question: str) -> str:
    payload = (
        resources.files("gp4nldr")
        .joinpath(f"assets/examples/{example_id}.json")
        .read_bytes()
    )
    archive = SessionArchive.from_bytes(payload)
    session = archive.to_session(run_ref=f"example:{example_id}")
    settings = load_rag_settings()
    store = build_store_from_dir(
        str(resources.files("gp4nldr").joinpath("assets/background")),
        settings.chunk_chars,
        settings.overlap_chars,
    )
    retrieved = []
    if detect_keywords(question, session.keyword_list):
        retrieved = query_store(store, question, top_k=settings.top_k)
    return build_prompt(archive.result, session, retrieved, question=question)


if __name__ == "__main__":
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for filename, (example_id, question) in CASES.items():
        prompt = build_golden(example_id, question)
        (GOLDEN_DIR / filename).write_text(prompt, encoding="utf-8")
        print(f"wrote tests/golden/{filename} ({len(prompt)} chars)")
