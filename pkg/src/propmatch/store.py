"""On-disk project store: corpora, queries, models, embeddings, ratings.

Layout under the store root:

    corpora/<id>/docs.jsonl        raw document lines as ingested
    corpora/<id>/parses.conllu     optional parses
    corpora/<id>/meta.json         format_version and counts
    queries/<id>.json              text, corpus binding, optional parse
    models/<name>.json             LR / LSTM / tf-idf model files
    embeddings.txt                 registered word-vector file
    ratings.csv                    append-only rating log with timestamps
    config.toml                    optional defaults (parser hook, k, n)

Corpora are immutable once registered; re-ingesting under the same id is an
error rather than an overwrite.
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import shutil
try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib
from pathlib import Path
from typing import Optional

from .corpus import Corpus, fallback_tokenize, ingest_corpus, parse_conllu
from .embeddings import EmbeddingTable, TfIdfModel, load_embeddings
from .errors import DuplicateId, UnknownId
from .filtering import PropositionQuery
from .models import load_model
from .pipeline import RatingRecord

FORMAT_VERSION = 1


class ProjectStore:
    """All persistent state for one matching project."""

    def __init__(self, root):
        self.root = Path(root)
        for sub in ("corpora", "queries", "models"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    # -- configuration ------------------------------------------------------

    def config(self) -> dict:
        path = self.root / "config.toml"
        if not path.exists():
            return {}
        with open(path, "rb") as fh:
            return tomllib.load(fh)

    # -- corpora ------------------------------------------------------------

    def add_corpus(self, corpus_id: str, doc_lines, parse_lines=None) -> Corpus:
        doc_lines = list(doc_lines)
        parse_lines = list(parse_lines) if parse_lines is not None else None
        corpus = ingest_corpus(doc_lines, parse_lines)  # validate first
        cdir = self.root / "corpora" / corpus_id
        if cdir.exists():
            raise DuplicateId(f"corpus {corpus_id!r} already registered")
        cdir.mkdir(parents=True)
        (cdir / "docs.jsonl").write_text(
            "\n".join(line.rstrip("\n") for line in doc_lines) + "\n"
        )
        if parse_lines is not None:
            (cdir / "parses.conllu").write_text(
                "\n".join(line.rstrip("\n") for line in parse_lines) + "\n"
            )
        (cdir / "meta.json").write_text(json.dumps({
            "format_version": FORMAT_VERSION,
            "id": corpus_id,
            "n_documents": len(corpus.documents),
            "n_sentences": len(corpus),
            "parsed": parse_lines is not None,
        }))
        return corpus

    def list_corpora(self) -> list:
        return sorted(p.name for p in (self.root / "corpora").iterdir()
                      if p.is_dir())

    def corpus_meta(self, corpus_id: str) -> dict:
        path = self.root / "corpora" / corpus_id / "meta.json"
        if not path.exists():
            raise UnknownId(f"no corpus {corpus_id!r}")
        return json.loads(path.read_text())

    def load_corpus(self, corpus_id: str) -> Corpus:
        cdir = self.root / "corpora" / corpus_id
        if not cdir.exists():
            raise UnknownId(f"no corpus {corpus_id!r}")
        docs = (cdir / "docs.jsonl").read_text().splitlines()
        parses = None
        if (cdir / "parses.conllu").exists():
            parses = (cdir / "parses.conllu").read_text().splitlines()
        return ingest_corpus(docs, parses)

    # -- queries ------------------------------------------------------------

    def add_query(self, text: str, corpus_id: str, conllu: Optional[str] = None,
                  query_id: Optional[str] = None) -> str:
        if not (self.root / "corpora" / corpus_id).exists():
            raise UnknownId(f"no corpus {corpus_id!r}")
        if query_id is None:
            existing = len(list((self.root / "queries").glob("*.json")))
            query_id = f"q{existing + 1:04d}"
        path = self.root / "queries" / f"{query_id}.json"
        if path.exists():
            raise DuplicateId(f"query {query_id!r} already registered")
        path.write_text(json.dumps({
            "format_version": FORMAT_VERSION,
            "id": query_id,
            "text": text,
            "corpus_id": corpus_id,
            "conllu": conllu,
        }))
        return query_id

    def list_queries(self) -> list:
        return sorted(p.stem for p in (self.root / "queries").glob("*.json"))

    def load_query(self, query_id: str) -> tuple:
        """(PropositionQuery, corpus_id)."""
        path = self.root / "queries" / f"{query_id}.json"
        if not path.exists():
            raise UnknownId(f"no query {query_id!r}")
        obj = json.loads(path.read_text())
        tokens, tree = None, None
        if obj.get("conllu"):
            [(parsed_tokens, parsed_tree)] = parse_conllu(
                io.StringIO(obj["conllu"])
            )
            tokens, tree = tuple(parsed_tokens), parsed_tree
        if tokens is None:
            tokens = tuple(fallback_tokenize(obj["text"]))
        query = PropositionQuery(id=obj["id"], text=obj["text"],
                                 tokens=tokens, tree=tree)
        return query, obj["corpus_id"]

    # -- embeddings ---------------------------------------------------------

    def register_embeddings(self, path) -> None:
        shutil.copyfile(path, self.root / "embeddings.txt")

    def has_embeddings(self) -> bool:
        return (self.root / "embeddings.txt").exists()

    def load_embedding_table(self) -> EmbeddingTable:
        path = self.root / "embeddings.txt"
        if not path.exists():
            raise UnknownId("no embeddings registered; run the embed step first")
        with open(path) as fh:
            return load_embeddings(fh)

    # -- models -------------------------------------------------------------

    def save_model(self, name: str, json_text: str) -> None:
        (self.root / "models" / f"{name}.json").write_text(json_text)

    def list_models(self) -> list:
        out = []
        for p in sorted((self.root / "models").glob("*.json")):
            kind = json.loads(p.read_text()).get("kind")
            out.append({"name": p.stem, "kind": kind})
        return out

    def load_model(self, name: str):
        path = self.root / "models" / f"{name}.json"
        if not path.exists():
            raise UnknownId(f"no model {name!r}")
        text = path.read_text()
        kind = json.loads(text).get("kind")
        if kind == "tfidf":
            return TfIdfModel.from_json(text)
        return load_model(text)

    def save_tfidf(self, corpus_id: str, model: TfIdfModel) -> None:
        obj = json.loads(model.to_json())
        obj["kind"] = "tfidf"
        self.save_model(f"tfidf-{corpus_id}", json.dumps(obj))

    def load_tfidf(self, corpus_id: str) -> TfIdfModel:
        model = self.load_model(f"tfidf-{corpus_id}")
        if not isinstance(model, TfIdfModel):
            raise UnknownId(f"model tfidf-{corpus_id} is not a tf-idf model")
        return model

    # -- ratings ------------------------------------------------------------

    def append_rating(self, record: RatingRecord) -> None:
        path = self.root / "ratings.csv"
        new = not path.exists()
        with open(path, "a", newline="") as fh:
            writer = csv.writer(fh)
            if new:
                writer.writerow(["timestamp", "rater", "query", "doc",
                                 "position", "score"])
            writer.writerow([
                datetime.datetime.now(datetime.timezone.utc).isoformat(),
                record.rater, record.query, record.doc_id,
                record.position, record.score,
            ])

    def load_ratings(self) -> list:
        path = self.root / "ratings.csv"
        if not path.exists():
            return []
        out = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0] == "timestamp":
                    continue
                out.append(RatingRecord(rater=row[1], query=row[2],
                                        doc_id=row[3], position=int(row[4]),
                                        score=int(row[5])))
        return out
