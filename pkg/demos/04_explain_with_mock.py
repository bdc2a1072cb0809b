"""The explanation layer, fully offline.

Loads the bundled Wine example archive, opens a chat session against the
deterministic mock provider, and walks one conversation: the automatic
opening summary, a follow-up about a feature, and a keyword question that
activates retrieval from the bundled background texts. The final print
shows the exact prompt a real model would receive.
"""

from importlib import resources

from gp4nldr import SessionArchive, advance_session, build_prompt
from gp4nldr.explain import detect_keywords, load_rag_settings
from gp4nldr.llm_client import mock_provider
from gp4nldr.rag import build_store_from_dir, query_store

archive = SessionArchive.from_bytes(
    resources.files("gp4nldr").joinpath("assets/examples/wine.json").read_bytes()
)
result = archive.result
session = archive.to_session(run_ref="example:wine")

settings = load_rag_settings()
store = build_store_from_dir(
    str(resources.files("gp4nldr").joinpath("assets/background")),
    settings.chunk_chars,
    settings.overlap_chars,
)
provider = mock_provider()  # echoes the prompt; swap for HttpChatProvider to go live

print("opening exchange (the session always starts with the summary request):")
advance_session(session, None, store, result, provider)
print(f"  human: {session.messages[0].text}")
print(f"  ai:    {session.messages[1].text[:80]}...\n")

question = "Is GP-MaL better than GP-MaL-2?"
hits = detect_keywords(question, session.keyword_list)
print(f"question: {question!r}")
print(f"keyword fragments matched: {hits}")
retrieved = query_store(store, question, top_k=settings.top_k)
print(f"retrieved {len(retrieved)} background chunk(s); first begins:")
print(f"  {retrieved[0][:100]}...\n")

prompt = build_prompt(result, session, retrieved, question=question)
print("the full prompt that would be sent:")
print("-" * 72)
print(prompt)
