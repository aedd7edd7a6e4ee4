"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error.  All subcommands work
against a project store directory (--store, or the PROPMATCH_STORE
environment variable).
"""

from __future__ import annotations

import json
import sys

import click

from .embeddings import fit_tfidf, load_embeddings
from .errors import PropmatchError
from .hooks import ParserHook
from .models import TrainConfig, recast_snli, read_snli, train_lr, train_lstm
from .pipeline import (
    PipelineConfig,
    RatingRecord,
    krippendorff_alpha_interval,
    load_frame_fixture,
    load_recall_fixture,
    measurement_to_csv,
    measure,
    match as run_match,
    precision_at_n,
    read_ratings_csv,
    recall_at_n,
)
from .runtime import build_resources, matches_with_context
from .store import ProjectStore


@click.group()
@click.option("--store", "store_path", default="propmatch-store",
              envvar="PROPMATCH_STORE", show_default=True,
              help="Project store directory.")
@click.pass_context
def cli(ctx, store_path):
    """Proposition matching over sentence corpora."""
    ctx.obj = ProjectStore(store_path)


@cli.command()
@click.argument("docs", type=click.Path(exists=True))
@click.option("--parses", type=click.Path(exists=True),
              help="CoNLL-U parses keyed by '# sent_id = DOC:POS'.")
@click.option("--id", "corpus_id", required=True, help="Corpus id to register.")
@click.pass_obj
def ingest(store, docs, parses, corpus_id):
    """Register a corpus from a JSONL document file."""
    with open(docs) as fh:
        doc_lines = fh.readlines()
    parse_lines = None
    if parses:
        with open(parses) as fh:
            parse_lines = fh.readlines()
    corpus = store.add_corpus(corpus_id, doc_lines, parse_lines)
    click.echo(f"registered corpus {corpus_id}: "
               f"{len(corpus.documents)} documents, {len(corpus)} sentences")


@cli.command()
@click.option("--vectors", type=click.Path(exists=True), required=True,
              help="Word-vector text file (word v1 v2 ...).")
@click.pass_obj
def embed(store, vectors):
    """Register the word-vector file used by the averaging filter."""
    with open(vectors) as fh:
        table = load_embeddings(fh)  # validate before storing
    store.register_embeddings(vectors)
    click.echo(f"registered {len(table.entries)} vectors of dimension {table.dim}")


@cli.command("fit-tfidf")
@click.option("--corpus", "corpus_id", required=True)
@click.pass_obj
def fit_tfidf_cmd(store, corpus_id):
    """Fit and store a tf-idf model for a corpus."""
    corpus = store.load_corpus(corpus_id)
    model = fit_tfidf(corpus)
    store.save_tfidf(corpus_id, model)
    click.echo(f"fitted tf-idf over {model.n_sentences} sentences, "
               f"vocabulary {len(model.vocab)}")


@cli.command()
@click.option("--kind", type=click.Choice(["lr", "lstm"]), required=True)
@click.option("--snli", "snli_path", type=click.Path(exists=True), required=True,
              help="NLI JSONL (gold_label, sentence1, sentence2, pairID).")
@click.option("--parses", "parses_path", type=click.Path(exists=True),
              required=True, help="CoNLL-U keyed pairID:premise / pairID:hypothesis.")
@click.option("--out", "model_name", default=None,
              help="Model name in the store (defaults to the kind).")
@click.option("--epochs", default=50, show_default=True)
@click.option("--learning-rate", default=1e-3, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--hidden-dim", default=128, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_obj
def train(store, kind, snli_path, parses_path, model_name, epochs,
          learning_rate, batch_size, hidden_dim, seed):
    """Train an entailment reranker on binary-recast NLI pairs."""
    with open(snli_path) as jf, open(parses_path) as cf:
        pairs = recast_snli(read_snli(jf, cf))
    config = TrainConfig(learning_rate=learning_rate, epochs=epochs,
                         batch_size=batch_size, hidden_dim=hidden_dim,
                         seed=seed)
    if kind == "lr":
        model = train_lr(pairs, config)
    else:
        table = store.load_embedding_table()
        model = train_lstm(pairs, table, config)
    store.save_model(model_name or kind, model.to_json())
    click.echo(f"trained {kind} model on {len(pairs)} pairs "
               f"-> {model_name or kind}")


def _resolve_query(store, query, query_id, corpus_id, query_parse):
    if query_id:
        return store.load_query(query_id)
    if not query or not corpus_id:
        raise click.UsageError("need either --query-id, or --query with --corpus")
    conllu = None
    if query_parse:
        with open(query_parse) as fh:
            conllu = fh.read()
    else:
        hook = ParserHook.from_config(store.config())
        if hook.available():
            conllu = hook.parse([query])
    qid = store.add_query(query, corpus_id, conllu=conllu)
    click.echo(f"registered query {qid}", err=True)
    return store.load_query(qid)


@cli.command("match")
@click.option("--query", help="Proposition text (registers a new query).")
@click.option("--query-id", help="A previously registered query id.")
@click.option("--corpus", "corpus_id", help="Corpus id (with --query).")
@click.option("--query-parse", type=click.Path(exists=True),
              help="CoNLL-U parse of the query sentence.")
@click.option("--k", default=250, show_default=True, help="Filter width.")
@click.option("--n", default=25, show_default=True, help="Output size.")
@click.option("--filter", "filter_", default="averaging", show_default=True,
              type=click.Choice(["averaging", "tfidf"]))
@click.option("--rerank", default="none", show_default=True,
              type=click.Choice(["none", "lr", "lstm"]))
@click.option("--model", default=None, help="Stored model name for reranking.")
@click.pass_obj
def match_cmd(store, query, query_id, corpus_id, query_parse, k, n,
              filter_, rerank, model):
    """Rank corpus sentences against a proposition query."""
    prop, bound_corpus = _resolve_query(store, query, query_id, corpus_id,
                                        query_parse)
    corpus = store.load_corpus(bound_corpus)
    config = PipelineConfig(filter=filter_, reranker=rerank, k=k, n=n)
    resources = build_resources(store, bound_corpus, config, model_name=model)
    rows = matches_with_context(prop, corpus, config, resources)
    for row in rows:
        scores = f"fast {row['fast_score']:.4f}"
        if row["rerank_score"] is not None:
            scores += f", rerank {row['rerank_score']:.4f}"
        if row["missing_parse"]:
            scores += ", no parse"
        date = row["date"] or "undated"
        click.echo(f"{row['rank']:>3}. [{scores}] "
                   f"{row['doc_id']}:{row['position']} ({date})")
        if row["context_before"]:
            click.echo(f"       {row['context_before']}")
        click.echo(f"     > {row['sentence']}")
        if row["context_after"]:
            click.echo(f"       {row['context_after']}")


@cli.command("measure")
@click.option("--query", help="Proposition text (registers a new query).")
@click.option("--query-id", help="A previously registered query id.")
@click.option("--corpus", "corpus_id", help="Corpus id (with --query).")
@click.option("--query-parse", type=click.Path(exists=True))
@click.option("--k", default=250, show_default=True)
@click.option("--n", default=50, show_default=True)
@click.option("--filter", "filter_", default="averaging", show_default=True,
              type=click.Choice(["averaging", "tfidf"]))
@click.option("--rerank", default="none", show_default=True,
              type=click.Choice(["none", "lr", "lstm"]))
@click.option("--model", default=None)
@click.pass_obj
def measure_cmd(store, query, query_id, corpus_id, query_parse, k, n,
                filter_, rerank, model):
    """Quarterly counts of the top matches, as CSV."""
    prop, bound_corpus = _resolve_query(store, query, query_id, corpus_id,
                                        query_parse)
    corpus = store.load_corpus(bound_corpus)
    config = PipelineConfig(filter=filter_, reranker=rerank, k=k, n=n)
    resources = build_resources(store, bound_corpus, config, model_name=model)
    matches = run_match(prop, corpus, config, resources)
    series = measure(matches, corpus)
    click.echo(measurement_to_csv(series), nl=False)
    if series.undated_matches:
        click.echo(f"undated matches: {series.undated_matches}", err=True)


@cli.command("eval-recall")
@click.option("--fixture", type=click.Path(exists=True), required=True,
              help="JSONL of {query, sentences, relevant}.")
@click.option("--n", "n_values", default="1,5,25", show_default=True,
              help="Comma-separated cutoffs.")
@click.pass_obj
def eval_recall(store, fixture, n_values):
    """Recall@n of the averaging scorer on an instance fixture."""
    from .filtering import AveragingScorer

    with open(fixture) as fh:
        instances = load_recall_fixture(fh)
    scorer = AveragingScorer(store.load_embedding_table())
    click.echo("n,recall")
    for raw in n_values.split(","):
        n = int(raw)
        click.echo(f"{n},{recall_at_n(instances, scorer, n):.4f}")


@cli.command("eval-precision")
@click.option("--annotations", type=click.Path(exists=True), required=True,
              help="JSONL of {doc_id, position, labels}.")
@click.option("--queries", "queries_path", type=click.Path(exists=True),
              required=True, help="JSONL of {query, frame}.")
@click.option("--corpus", "corpus_id", required=True)
@click.option("--n", default=25, show_default=True)
@click.pass_obj
def eval_precision(store, annotations, queries_path, corpus_id, n):
    """Precision@n of frame labels over a corpus."""
    from .filtering import AveragingScorer

    with open(annotations) as af, open(queries_path) as qf:
        queries, ann = load_frame_fixture(af, qf)
    corpus = store.load_corpus(corpus_id)
    scorer = AveragingScorer(store.load_embedding_table())
    per_query, macro = precision_at_n(queries, corpus, ann, scorer, n)
    click.echo("query,precision")
    for qid in sorted(per_query):
        click.echo(f"{qid},{per_query[qid]:.4f}")
    click.echo(f"macro,{macro:.4f}")


@cli.group()
def ratings():
    """Record and analyze 1-5 relevance ratings."""


@ratings.command("add")
@click.option("--rater", required=True)
@click.option("--query", required=True)
@click.option("--doc", "doc_id", required=True)
@click.option("--position", type=int, required=True)
@click.option("--score", type=int, required=True)
@click.pass_obj
def ratings_add(store, rater, query, doc_id, position, score):
    """Append one rating to the store."""
    try:
        record = RatingRecord(rater=rater, query=query, doc_id=doc_id,
                              position=position, score=score)
    except ValueError as exc:
        raise PropmatchError(str(exc))
    store.append_rating(record)
    click.echo("recorded")


@ratings.command("import")
@click.argument("csvfile", type=click.Path(exists=True))
@click.pass_obj
def ratings_import(store, csvfile):
    """Append ratings from a rater,query,doc,position,score CSV."""
    with open(csvfile) as fh:
        records = read_ratings_csv(fh)
    for r in records:
        store.append_rating(r)
    click.echo(f"imported {len(records)} ratings")


@ratings.command("alpha")
@click.pass_obj
def ratings_alpha(store):
    """Krippendorff's interval alpha over all recorded ratings."""
    value = krippendorff_alpha_interval(store.load_ratings())
    click.echo(f"{value:.6f}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--strict", is_flag=True,
              help="Reject reranked matching when the query has no parse.")
@click.pass_obj
def serve(store, host, port, strict):
    """Run the HTTP service."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(store, strict=strict), host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except PropmatchError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
