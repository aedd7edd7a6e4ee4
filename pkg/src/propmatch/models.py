"""Entailment rerankers: logistic regression over edit features and an LSTM
over vectorized edit sequences, both trained with Adam on binary-recast NLI
pairs.

The LSTM is implemented directly in numpy (forward, backpropagation through
time, Adam) so gradients can be verified against finite differences.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .corpus import Sentence, parse_conllu_keyed
from .embeddings import EmbeddingTable
from .errors import DanglingParse, DegenerateLabels, DimensionMismatch
from .filtering import PropositionQuery
from .treeedit import (
    KINDS,
    SearchConfig,
    extract_features,
    find_edit_sequence,
    vectorize_sequence,
)

N_FEATURES = 33


def sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.clip(x, -500, 500))),
                    np.exp(np.clip(x, -500, 500)) / (1.0 + np.exp(np.clip(x, -500, 500))))


@dataclass(frozen=True)
class LabeledPair:
    candidate: Sentence          # premise: the sentence that should entail
    query: PropositionQuery      # hypothesis: the proposition
    label: int                   # 1 = entailment, 0 = contradiction/neutral

    def __post_init__(self):
        if self.candidate.tree is None or self.query.tree is None:
            raise DanglingParse("labeled pairs require parses on both sides")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 50
    batch_size: int = 32
    l2: float = 1e-4          # LR only
    seed: int = 0
    hidden_dim: int = 128     # LSTM only
    positive_weight: float = 1.0  # optional class reweighting, off by default

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("rates and sizes must be positive")


def recast_snli(records) -> list:
    """Binary recast of NLI records.

    Each record is a dict with gold_label, premise/hypothesis Sentence
    objects (parses attached), and a pair id.  entailment -> 1,
    contradiction/neutral -> 0, gold "-" dropped.
    """
    pairs = []
    for rec in records:
        gold = rec["gold_label"]
        if gold == "-":
            continue
        label = 1 if gold == "entailment" else 0
        premise: Sentence = rec["premise"]
        hypothesis: Sentence = rec["hypothesis"]
        if premise.tree is None or hypothesis.tree is None:
            raise DanglingParse(f"missing parse for pair {rec.get('pairID')!r}")
        query = PropositionQuery(
            id=str(rec.get("pairID", hypothesis.id)),
            text=hypothesis.text,
            tokens=hypothesis.tokens,
            tree=hypothesis.tree,
        )
        pairs.append(LabeledPair(candidate=premise, query=query, label=label))
    return pairs


def read_snli(jsonl_stream, conllu_stream) -> list:
    """Join SNLI-style JSONL with CoNLL-U parses keyed pairID:premise /
    pairID:hypothesis, yielding record dicts for recast_snli."""
    parses = parse_conllu_keyed(conllu_stream)
    records = []
    for line in jsonl_stream:
        if not line.strip():
            continue
        obj = json.loads(line)
        pair_id = obj["pairID"]
        records.append(
            {
                "gold_label": obj["gold_label"],
                "pairID": pair_id,
                "premise": _sentence_from_parse(parses, f"{pair_id}:premise", obj["sentence1"]),
                "hypothesis": _sentence_from_parse(parses, f"{pair_id}:hypothesis", obj["sentence2"]),
            }
        )
    return records


def _sentence_from_parse(parses, key, text):
    parsed = parses.get(key)
    if parsed is None:
        return Sentence(id=key, text=text, tokens=(), position=0, tree=None)
    tokens, tree = parsed
    return Sentence(id=key, text=text, tokens=tuple(tokens), position=0, tree=tree)


# ---------------------------------------------------------------------------
# Adam


class Adam:
    """Standard Adam over a list of parameter arrays, updated in place."""

    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m[...] = self.b1 * m + (1 - self.b1) * g
            v[...] = self.b2 * v + (1 - self.b2) * g * g
            mhat = m / (1 - self.b1 ** self.t)
            vhat = v / (1 - self.b2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


# ---------------------------------------------------------------------------
# logistic regression


@dataclass
class LRModel:
    weights: np.ndarray  # (33,)
    bias: float

    def to_json(self) -> str:
        return json.dumps(
            {"format_version": 1, "kind": "lr",
             "weights": list(self.weights), "bias": self.bias}
        )

    @classmethod
    def from_json(cls, text: str) -> "LRModel":
        obj = json.loads(text)
        return cls(weights=np.array(obj["weights"]), bias=float(obj["bias"]))


def lr_score(features, model: LRModel) -> float:
    values = features.as_array() if hasattr(features, "as_array") else np.asarray(features, dtype=np.float64)
    if values.shape != model.weights.shape:
        raise DimensionMismatch(
            f"feature length {values.shape} vs weights {model.weights.shape}"
        )
    return float(sigmoid(np.dot(model.weights, values) + model.bias))


def _check_labels(y):
    if len(set(int(v) for v in y)) < 2:
        warnings.warn("training data contains a single class", DegenerateLabels)


def fit_logistic(X, y, config: TrainConfig = TrainConfig()) -> LRModel:
    """Minimize mean binary cross-entropy + L2 with Adam over raw features."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("feature matrix must be 2-d")
    _check_labels(y)
    rng = np.random.default_rng(config.seed)
    w = np.zeros(X.shape[1])
    b = np.zeros(1)
    opt = Adam([w, b], config.learning_rate, config.beta1, config.beta2, config.eps)
    n = len(X)
    sample_w = np.where(y == 1, config.positive_weight, 1.0)
    for _epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            xb, yb, sw = X[idx], y[idx], sample_w[idx]
            p = sigmoid(xb @ w + b[0])
            err = (p - yb) * sw
            gw = xb.T @ err / len(idx) + config.l2 * w
            gb = np.array([err.mean()])
            opt.step([gw, gb])
    return LRModel(weights=w, bias=float(b[0]))


def pair_features(pairs, search_config: SearchConfig = SearchConfig()) -> np.ndarray:
    """Edit-script features for (candidate -> query) tree transformations."""
    rows = []
    for pair in pairs:
        seq = find_edit_sequence(pair.candidate.tree, pair.query.tree, search_config)
        rows.append(extract_features(seq, pair.candidate.tree, pair.query.tree).as_array())
    return np.array(rows)


def train_lr(pairs, config: TrainConfig = TrainConfig(),
             search_config: SearchConfig = SearchConfig()) -> LRModel:
    if not pairs:
        raise ValueError("no training pairs")
    X = pair_features(pairs, search_config)
    y = np.array([p.label for p in pairs], dtype=np.float64)
    return fit_logistic(X, y, config)


# ---------------------------------------------------------------------------
# LSTM


@dataclass
class LSTMModel:
    """Single-layer LSTM with affine readout to one logit.

    Gate rows of Wx/Wh/b are stacked [input, forget, output, cell] blocks of
    hidden_dim rows each.
    """

    input_dim: int
    hidden_dim: int
    Wx: np.ndarray       # (4H, D)
    Wh: np.ndarray       # (4H, H)
    b: np.ndarray        # (4H,)
    w_out: np.ndarray    # (H,)
    b_out: np.ndarray    # (1,)

    @classmethod
    def init(cls, input_dim, hidden_dim, seed=0, scale=0.05) -> "LSTMModel":
        rng = np.random.default_rng(seed)
        u = lambda *shape: rng.uniform(-scale, scale, size=shape)
        return cls(
            input_dim=input_dim,
            hidden_dim=hidden_dim,
            Wx=u(4 * hidden_dim, input_dim),
            Wh=u(4 * hidden_dim, hidden_dim),
            b=u(4 * hidden_dim),
            w_out=u(hidden_dim),
            b_out=u(1),
        )

    def params(self):
        return [self.Wx, self.Wh, self.b, self.w_out, self.b_out]

    def to_json(self) -> str:
        return json.dumps(
            {
                "format_version": 1,
                "kind": "lstm",
                "input_dim": self.input_dim,
                "hidden_dim": self.hidden_dim,
                "Wx": self.Wx.ravel().tolist(),
                "Wh": self.Wh.ravel().tolist(),
                "b": self.b.tolist(),
                "w_out": self.w_out.tolist(),
                "b_out": self.b_out.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LSTMModel":
        o = json.loads(text)
        d, h = o["input_dim"], o["hidden_dim"]
        return cls(
            input_dim=d, hidden_dim=h,
            Wx=np.array(o["Wx"]).reshape(4 * h, d),
            Wh=np.array(o["Wh"]).reshape(4 * h, h),
            b=np.array(o["b"]),
            w_out=np.array(o["w_out"]),
            b_out=np.array(o["b_out"]),
        )


def _lstm_forward(model: LSTMModel, steps):
    """Run the recurrence, returning the probability and a cache for BPTT."""
    H = model.hidden_dim
    h = np.zeros(H)
    c = np.zeros(H)
    cache = []
    for x in steps:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (model.input_dim,):
            raise DimensionMismatch(
                f"step vector has shape {x.shape}, expected ({model.input_dim},)"
            )
        z = model.Wx @ x + model.Wh @ h + model.b
        i = sigmoid(z[:H])
        f = sigmoid(z[H : 2 * H])
        o = sigmoid(z[2 * H : 3 * H])
        g = np.tanh(z[3 * H :])
        c_new = f * c + i * g
        h_new = o * np.tanh(c_new)
        cache.append((x, h, c, i, f, o, g, c_new))
        h, c = h_new, c_new
    logit = model.w_out @ h + model.b_out[0]
    p = float(sigmoid(np.array([logit]))[0])
    return p, h, cache


def lstm_score(steps, model: LSTMModel) -> float:
    """Probability from reading the edit-step vectors in sequence."""
    if not steps:
        steps = [np.zeros(model.input_dim)]
    p, _h, _cache = _lstm_forward(model, steps)
    return p


def lstm_grads(model: LSTMModel, steps, label: float, weight: float = 1.0):
    """BCE loss and gradients for one sequence, via BPTT."""
    H = model.hidden_dim
    p, h_T, cache = _lstm_forward(model, steps)
    eps = 1e-12
    loss = -weight * (label * np.log(p + eps) + (1 - label) * np.log(1 - p + eps))

    gWx = np.zeros_like(model.Wx)
    gWh = np.zeros_like(model.Wh)
    gb = np.zeros_like(model.b)
    dlogit = weight * (p - label)
    gw_out = dlogit * h_T
    gb_out = np.array([dlogit])

    dh = dlogit * model.w_out
    dc = np.zeros(H)
    for x, h_prev, c_prev, i, f, o, g, c_new in reversed(cache):
        tanh_c = np.tanh(c_new)
        do = dh * tanh_c
        dc = dc + dh * o * (1 - tanh_c ** 2)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), do * o * (1 - o), dg * (1 - g ** 2)]
        )
        gWx += np.outer(dz, x)
        gWh += np.outer(dz, h_prev)
        gb += dz
        dh = model.Wh.T @ dz
        dc = dc * f
    return loss, [gWx, gWh, gb, gw_out, gb_out]


def train_lstm(pairs, table: EmbeddingTable, config: TrainConfig = TrainConfig(),
               search_config: SearchConfig = SearchConfig(),
               sequences=None, labels=None) -> LSTMModel:
    """Train on vectorized edit sequences with Adam.

    ``sequences``/``labels`` may be supplied directly (already-vectorized
    steps) to skip the edit search, e.g. for tests or cached features.
    """
    if sequences is None:
        if not pairs:
            raise ValueError("no training pairs")
        sequences = []
        for pair in pairs:
            seq = find_edit_sequence(pair.candidate.tree, pair.query.tree, search_config)
            sequences.append(vectorize_sequence(seq, table))
        labels = [p.label for p in pairs]
    labels = np.asarray(labels, dtype=np.float64)
    _check_labels(labels)
    input_dim = len(KINDS) + table.dim
    model = LSTMModel.init(input_dim, config.hidden_dim, seed=config.seed)
    opt = Adam(model.params(), config.learning_rate, config.beta1, config.beta2, config.eps)
    rng = np.random.default_rng(config.seed)
    n = len(sequences)
    for _epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            grads = None
            for j in idx:
                w = config.positive_weight if labels[j] == 1 else 1.0
                _loss, g = lstm_grads(model, sequences[j], labels[j], weight=w)
                if grads is None:
                    grads = g
                else:
                    grads = [a + b for a, b in zip(grads, g)]
            grads = [g / len(idx) for g in grads]
            opt.step(grads)
    return model


def load_model(text: str):
    kind = json.loads(text).get("kind")
    if kind == "lr":
        return LRModel.from_json(text)
    if kind == "lstm":
        return LSTMModel.from_json(text)
    raise ValueError(f"unknown model kind {kind!r}")
