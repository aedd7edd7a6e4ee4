"""Proposition matching: rank corpus sentences against an idea sentence with
a fast word-vector filter cascaded into a tree-edit entailment reranker, and
aggregate matches into quarterly frequency series."""

from .corpus import (
    Corpus,
    DepTree,
    Document,
    Sentence,
    Token,
    TreeNode,
    fallback_tokenize,
    ingest_corpus,
    parse_conllu,
    serialize_conllu,
    tree_from_tokens,
)
from .embeddings import (
    EmbeddingTable,
    TfIdfModel,
    avg_vector,
    cosine,
    fit_tfidf,
    load_embeddings,
    tfidf_vector,
)
from .filtering import AveragingScorer, PropositionQuery, ScoredSentence, TfIdfScorer, fast_score, top_k
from .models import (
    LabeledPair,
    LRModel,
    LSTMModel,
    TrainConfig,
    fit_logistic,
    lr_score,
    lstm_score,
    recast_snli,
    train_lr,
    train_lstm,
)
from .pipeline import (
    MeasurementSeries,
    PipelineConfig,
    RankedMatch,
    RatingRecord,
    Resources,
    krippendorff_alpha_interval,
    match,
    measure,
    precision_at_n,
    recall_at_n,
)
from .treeedit import (
    EditOp,
    EditSequence,
    SearchConfig,
    TreeEditFeatures,
    apply_edit,
    extract_features,
    find_edit_sequence,
    trees_equal,
    vectorize_sequence,
)
from .hooks import ParserHook
from .store import ProjectStore

__version__ = "0.1.0"
