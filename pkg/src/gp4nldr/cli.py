"""Headless access to runs, chat, and the vector store.

Exit codes: 0 success, 1 runtime failure, 2 flag/config validation.
All subcommands accept ``--json`` for machine-parseable stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .archive import ArchiveError, SessionArchive
from .data import DatasetError, load_csv
from .evolution import BloatControl, RunConfig, run_experiment
from .explain import (
    ChatSession,
    advance_session,
    build_prompt,
    detect_keywords,
    load_rag_settings,
    query_store,
)
from .fitness import FITNESS_IDS
from . import llm_client
from .rag import build_store_from_dir, load_store, save_store

BLOAT_CHOICES = ("none", "lexicographic", "double", "tarpeian")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a probability in [0, 1], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gp4nldr",
        description="Evolve interpretable dimensionality reductions and explain them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an evolutionary reduction on a CSV dataset")
    run.add_argument("--dataset", required=True, help="path to a CSV file")
    run.add_argument("--label-col", default="last",
                     help="label column name, 0-based index, or 'last' (default)")
    run.add_argument("--no-header", action="store_true", help="CSV has no header row")
    run.add_argument("--name", default=None, help="dataset display name")
    run.add_argument("--fitness", choices=FITNESS_IDS, default="gpmal")
    run.add_argument("--dims", type=_positive_int, default=2)
    run.add_argument("--pop", type=_positive_int, default=100)
    run.add_argument("--gens", type=_positive_int, default=100)
    run.add_argument("--bloat", choices=BLOAT_CHOICES, default="lexicographic")
    run.add_argument("--p-smaller", type=_probability, default=0.7,
                     help="double tournament: probability the smaller finalist wins")
    run.add_argument("--size-first", action="store_true",
                     help="double tournament: run the size tournaments first")
    run.add_argument("--tarpeian-p", type=_probability, default=0.3,
                     help="Tarpeian: per-individual penalty probability")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--workers", type=_positive_int, default=1)
    run.add_argument("--out", required=True, help="output archive path (JSON)")
    run.add_argument("--quiet", action="store_true", help="suppress progress on stderr")
    run.add_argument("--json", action="store_true", help="machine-parseable stdout")

    chat = sub.add_parser("chat", help="ask questions about a saved run result")
    chat.add_argument("--result", required=True, help="archive JSON written by 'run'")
    chat.add_argument("--question", default=None,
                      help="one question; omit for an interactive transcript")
    chat.add_argument("--mock", action="store_true",
                      help="use the offline mock provider (no API key needed)")
    chat.add_argument("--show-prompt", action="store_true",
                      help="print the assembled prompt instead of querying a provider")
    chat.add_argument("--store", default=None,
                      help="vector store JSON file (default: bundled background texts)")
    chat.add_argument("--docs", default=None,
                      help="build the store from this directory instead of a store file")
    chat.add_argument("--word-limit", type=_positive_int, default=None)
    chat.add_argument("--model", default=None)
    chat.add_argument("--save", default=None, help="write the updated archive here")
    chat.add_argument("--json", action="store_true")

    store = sub.add_parser("store", help="manage the retrieval vector store")
    store_sub = store.add_subparsers(dest="store_command", required=True)
    build = store_sub.add_parser("build", help="chunk and vectorize a document directory")
    build.add_argument("--docs", required=True, help="directory of .txt/.md files")
    build.add_argument("--out", required=True, help="output store path (JSON)")
    build.add_argument("--config", default=None, help="RAG settings JSON file")
    build.add_argument("--json", action="store_true")

    serve = sub.add_parser("serve", help="start the HTTP API (and dashboard, if built)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--ui", default=None,
                       help="directory with the built dashboard (default: ./frontend if present)")

    return parser


def _emit(payload: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(payload))
    else:
        for line in lines:
            print(line)


def cmd_run(args: argparse.Namespace) -> int:
    path = Path(args.dataset)
    try:
        source = path.read_bytes()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return 1

    try:
        dataset = load_csv(
            source,
            has_header=not args.no_header,
            label_column=args.label_col,
            name=args.name or path.stem,
        )
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    bloat_method = {"double": "double_tournament"}.get(args.bloat, args.bloat)
    try:
        config = RunConfig(
            population_size=args.pop,
            generations=args.gens,
            final_dimensions=args.dims,
            fitness_id=args.fitness,
            bloat=BloatControl(
                method=bloat_method,
                order_fitness_first=not args.size_first,
                p_smaller=args.p_smaller,
                p_tarpeian=args.tarpeian_p,
            ),
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def progress(done: int, best: float) -> None:
        if not args.quiet and (done % 10 == 0 or done == config.generations):
            print(f"generation {done}/{config.generations} best={best:.6f}", file=sys.stderr)

    try:
        result = run_experiment(dataset, config, progress=progress, workers=args.workers)
        archive = SessionArchive(result=result)
        Path(args.out).write_bytes(archive.to_bytes())
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    payload = {
        "out": str(args.out),
        "dataset": dataset.name,
        "expressions": list(result.expressions),
        "best_fitness": result.best_individual.fitness,
        "accuracy_original": result.accuracy_original,
        "accuracy_embedding": result.accuracy_embedding,
    }
    _emit(
        payload,
        args.json,
        [f"wrote {args.out}"]
        + [f"dimension {i + 1}: {e}" for i, e in enumerate(result.expressions)]
        + [
            f"best fitness: {result.best_individual.fitness:.6f}",
            f"accuracy: original {result.accuracy_original:.4f}, "
            f"embedding {result.accuracy_embedding:.4f}",
        ],
    )
    return 0


def _load_chat_store(args: argparse.Namespace):
    settings = load_rag_settings()
    if args.docs:
        return build_store_from_dir(args.docs, settings.chunk_chars, settings.overlap_chars)
    if args.store:
        return load_store(args.store)
    from importlib import resources

    background = resources.files("gp4nldr").joinpath("assets/background")
    return build_store_from_dir(str(background), settings.chunk_chars, settings.overlap_chars)


def cmd_chat(args: argparse.Namespace) -> int:
    try:
        archive = SessionArchive.from_bytes(Path(args.result).read_bytes())
    except (OSError, ArchiveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    session = archive.to_session(run_ref=f"file:{args.result}")
    if args.word_limit is not None:
        session.word_limit = args.word_limit
    if args.model is not None:
        session.model_id = args.model
    store = _load_chat_store(args)
    result = archive.result

    if args.show_prompt:
        question = args.question
        retrieved = []
        if question is not None and detect_keywords(question, session.keyword_list):
            retrieved = query_store(store, question, top_k=load_rag_settings().top_k)
        print(build_prompt(result, session, retrieved, question=question), end="")
        return 0

    if args.mock:
        provider = llm_client.mock_provider(None, echo=True)
    else:
        cfg = llm_client.ProviderConfig.from_env(model_id=session.model_id)
        if not cfg.api_key:
            print(
                f"error: no API key; set {llm_client.ENV_API_KEY} or pass --mock",
                file=sys.stderr,
            )
            return 1
        provider = llm_client.HttpChatProvider(cfg)

    def exchange(question: str | None) -> str | None:
        try:
            return advance_session(session, question, store, result, provider)
        except llm_client.ProviderError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return None

    answers: list[dict] = []
    if args.question is not None:
        answer = exchange(args.question)
        if answer is None:
            return 1
        answers.append({"question": args.question, "answer": answer})
        _emit({"answers": answers}, args.json, [answer])
    else:
        if not session.messages:
            answer = exchange(None)
            if answer is None:
                return 1
            print(f"AI: {answer}")
        print("enter questions (EOF to finish):", file=sys.stderr)
        for line in sys.stdin:
            question = line.strip()
            if not question:
                continue
            answer = exchange(question)
            if answer is None:
                return 1
            print(f"AI: {answer}")

    if args.save:
        updated = SessionArchive.from_session(result, session)
        Path(args.save).write_bytes(updated.to_bytes())
    return 0


def cmd_store_build(args: argparse.Namespace) -> int:
    settings = load_rag_settings(args.config)
    docs_dir = Path(args.docs)
    if not docs_dir.is_dir():
        print(f"error: {docs_dir} is not a directory", file=sys.stderr)
        return 1
    store = build_store_from_dir(docs_dir, settings.chunk_chars, settings.overlap_chars)
    if len(store) == 0:
        print(f"warning: no .txt/.md documents found in {docs_dir}", file=sys.stderr)
    save_store(store, args.out)
    _emit(
        {"out": str(args.out), "chunks": len(store)},
        args.json,
        [f"wrote {args.out} with {len(store)} chunk(s)"],
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    ui_dir = args.ui
    if ui_dir is None and (Path("frontend") / "index.html").exists():
        ui_dir = "frontend"
    if ui_dir is not None:
        print(f"serving dashboard from {ui_dir}", file=sys.stderr)
    uvicorn.run(create_app(ui_dir=ui_dir), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "chat":
        return cmd_chat(args)
    if args.command == "store":
        return cmd_store_build(args)
    if args.command == "serve":
        return cmd_serve(args)
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
