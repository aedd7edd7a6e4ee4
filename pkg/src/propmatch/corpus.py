"""Documents, sentences, tokens, dependency trees, and their ingestion.

Corpora arrive as JSONL (one document per line) and parses as CoNLL-U with
``# sent_id = docid:position`` comments.  Everything here is immutable after
ingestion, so readers may share these objects freely across threads.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional

from .errors import DanglingParse, DuplicateId, MalformedParse

# Characters stripped from the edges of whitespace-split pieces by the
# fallback tokenizer.  Includes the usual ASCII punctuation plus curly
# quotes and dashes common in news text.
_STRIP_CHARS = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~‘’“”–—…"


@dataclass(frozen=True)
class Token:
    """One token of a sentence.

    ``head`` and ``deprel`` are None for tokens produced by the fallback
    tokenizer, which never sees a parse.
    """

    index: int
    form: str
    lemma: str
    pos: str
    head: Optional[int] = None
    deprel: Optional[str] = None

    def __post_init__(self):
        if self.index < 1:
            raise MalformedParse(f"token index must be >= 1, got {self.index}")
        if self.head is not None:
            if self.head < 0:
                raise MalformedParse(f"token head must be >= 0, got {self.head}")
            if self.head == self.index:
                raise MalformedParse(f"token {self.index} heads itself")
            if not self.deprel:
                raise MalformedParse(f"token {self.index} has a head but no deprel")


@dataclass(frozen=True)
class TreeNode:
    """A node of a dependency tree.

    Children are split into an ordered left list and an ordered right list,
    both ordered by original token index.  ``uid`` identifies the node across
    functional edits and is excluded from equality.
    """

    lemma: str
    pos: str
    deprel: str
    left: tuple = ()
    right: tuple = ()
    uid: int = field(default=-1, compare=False)

    def children(self):
        return self.left + self.right

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children())

    def signature(self):
        """Canonical hashable form, independent of uids."""
        return (
            self.lemma,
            self.pos,
            self.deprel,
            tuple(c.signature() for c in self.left),
            tuple(c.signature() for c in self.right),
        )


@dataclass(frozen=True)
class DepTree:
    """A rooted ordered dependency tree."""

    root: TreeNode

    def size(self) -> int:
        return self.root.size()

    def signature(self):
        return self.root.signature()

    def nodes(self) -> Iterator[TreeNode]:
        """Preorder traversal (node, then left children, then right)."""
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children()))


def tree_from_tokens(tokens: list[Token]) -> DepTree:
    """Build a DepTree from head-annotated tokens.

    Left children are dependents with index < head, right children those with
    index > head; each list is ordered by token index.
    """
    roots = [t for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise MalformedParse(f"expected exactly one root, found {len(roots)}")
    by_head: dict[int, list[Token]] = {}
    for t in tokens:
        if t.head is None:
            raise MalformedParse(f"token {t.index} has no head")
        by_head.setdefault(t.head, []).append(t)

    seen: set[int] = set()

    def build(tok: Token) -> TreeNode:
        if tok.index in seen:
            raise MalformedParse("cycle detected in dependency heads")
        seen.add(tok.index)
        deps = sorted(by_head.get(tok.index, ()), key=lambda t: t.index)
        left = tuple(build(t) for t in deps if t.index < tok.index)
        right = tuple(build(t) for t in deps if t.index > tok.index)
        return TreeNode(tok.lemma, tok.pos, tok.deprel, left, right)

    root = build(roots[0])
    if len(seen) != len(tokens):
        raise MalformedParse("cycle detected: not all tokens reachable from root")
    return DepTree(root)


def _iter_conllu_blocks(stream: Iterable[str]):
    """Yield (comments, token_rows) per sentence block."""
    comments: list[str] = []
    rows: list[list[str]] = []
    for raw in stream:
        line = raw.rstrip("\n")
        if not line.strip():
            if comments or rows:
                yield comments, rows
                comments, rows = [], []
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) < 8:
            raise MalformedParse(f"expected >= 8 tab-separated columns: {line!r}")
        # multiword-token ranges (1-2) and empty nodes (1.1) are skipped
        if "-" in cols[0] or "." in cols[0]:
            continue
        rows.append(cols)
    if comments or rows:
        yield comments, rows


def _tokens_from_rows(rows: list[list[str]]) -> list[Token]:
    tokens = []
    for cols in rows:
        try:
            index = int(cols[0])
            head = int(cols[6])
        except ValueError as e:
            raise MalformedParse(f"non-integer index/head in row {cols[:8]}") from e
        tokens.append(
            Token(
                index=index,
                form=cols[1],
                lemma=cols[2],
                pos=cols[3],
                head=head,
                deprel=cols[7],
            )
        )
    return tokens


def parse_conllu(stream: Iterable[str]) -> list[tuple[list[Token], DepTree]]:
    """Parse a CoNLL-U stream into (tokens, tree) pairs, one per block."""
    out = []
    for _comments, rows in _iter_conllu_blocks(stream):
        if not rows:
            continue
        tokens = _tokens_from_rows(rows)
        out.append((tokens, tree_from_tokens(tokens)))
    return out


def parse_conllu_keyed(stream: Iterable[str]) -> dict[str, tuple[list[Token], DepTree]]:
    """Like parse_conllu, but keyed by the ``# sent_id = ...`` comment."""
    out = {}
    for comments, rows in _iter_conllu_blocks(stream):
        if not rows:
            continue
        sent_id = None
        for c in comments:
            body = c.lstrip("#").strip()
            if body.startswith("sent_id"):
                sent_id = body.split("=", 1)[1].strip()
        tokens = _tokens_from_rows(rows)
        tree = tree_from_tokens(tokens)
        if sent_id is not None:
            out[sent_id] = (tokens, tree)
    return out


def serialize_conllu(parses, sent_ids=None) -> str:
    """Serialize (tokens, tree) pairs back to CoNLL-U text.

    Inverse of parse_conllu for valid input.  ``sent_ids``, when given, adds
    ``# sent_id`` comments in parallel with the parses.
    """
    blocks = []
    for i, (tokens, _tree) in enumerate(parses):
        lines = []
        if sent_ids is not None:
            lines.append(f"# sent_id = {sent_ids[i]}")
        for t in tokens:
            lines.append(
                "\t".join(
                    [str(t.index), t.form, t.lemma, t.pos, "_", "_",
                     str(t.head), t.deprel or "_", "_", "_"]
                )
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def fallback_tokenize(text: str) -> list[Token]:
    """Whitespace tokenization with edge punctuation stripped.

    Used when no parse is available; lemmas are lowercased forms since they
    only ever feed embedding/tf-idf lookup.
    """
    tokens = []
    for piece in text.split():
        stripped = piece.strip(_STRIP_CHARS)
        if not stripped:
            continue
        tokens.append(
            Token(index=len(tokens) + 1, form=stripped, lemma=stripped.lower(), pos="X")
        )
    return tokens


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str
    tokens: tuple
    position: int
    tree: Optional[DepTree] = None


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple
    date: Optional[datetime.date] = None
    source: Optional[str] = None


@dataclass(frozen=True)
class Corpus:
    documents: tuple
    sentence_index: tuple  # of (doc_id, position)

    def __len__(self):
        return len(self.sentence_index)

    def document(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    @property
    def _by_id(self):
        # cached lazily on the instance despite frozen dataclass
        cache = object.__getattribute__(self, "__dict__").get("_docmap")
        if cache is None:
            cache = {d.id: d for d in self.documents}
            object.__getattribute__(self, "__dict__")["_docmap"] = cache
        return cache

    def sentence(self, doc_id: str, position: int) -> Sentence:
        return self._by_id[doc_id].sentences[position]

    def sentences(self) -> Iterator[Sentence]:
        for doc_id, pos in self.sentence_index:
            yield self.sentence(doc_id, pos)


def _check_tree_consistency(doc_id, pos, tokens, tree):
    tree_nodes = sorted_nodes_by_token_order(tree)
    if len(tree_nodes) != len(tokens):
        raise DanglingParse(
            f"parse for {doc_id}:{pos} has {len(tree_nodes)} nodes "
            f"but sentence has {len(tokens)} tokens"
        )


def sorted_nodes_by_token_order(tree: DepTree) -> list[TreeNode]:
    """In-order traversal: left children, node, right children."""
    out = []

    def walk(n):
        for c in n.left:
            walk(c)
        out.append(n)
        for c in n.right:
            walk(c)

    walk(tree.root)
    return out


def ingest_corpus(docs, parses=None) -> Corpus:
    """Build a Corpus from a JSONL stream, attaching parses where keyed.

    ``docs``: iterable of JSONL lines ({"id", "date"?, "source"?, "sentences"}).
    ``parses``: optional CoNLL-U stream with ``# sent_id = docid:position``.
    """
    parse_map = parse_conllu_keyed(parses) if parses is not None else {}
    documents = []
    seen_ids = set()
    sentence_index = []
    sentence_keys = set()

    for line in docs:
        if not line.strip():
            continue
        rec = json.loads(line)
        doc_id = rec["id"]
        if doc_id in seen_ids:
            raise DuplicateId(f"duplicate document id {doc_id!r}")
        seen_ids.add(doc_id)
        date = None
        if rec.get("date"):
            date = datetime.date.fromisoformat(rec["date"])
        sentences = []
        for pos, text in enumerate(rec["sentences"]):
            key = f"{doc_id}:{pos}"
            sentence_keys.add(key)
            parsed = parse_map.get(key)
            if parsed is not None:
                tokens, tree = parsed
                _check_tree_consistency(doc_id, pos, tokens, tree)
            else:
                tokens, tree = fallback_tokenize(text), None
            sentences.append(
                Sentence(id=key, text=text, tokens=tuple(tokens), position=pos, tree=tree)
            )
            sentence_index.append((doc_id, pos))
        documents.append(
            Document(id=doc_id, sentences=tuple(sentences), date=date, source=rec.get("source"))
        )

    dangling = set(parse_map) - sentence_keys
    if dangling:
        raise DanglingParse(f"parses reference missing sentences: {sorted(dangling)}")
    return Corpus(documents=tuple(documents), sentence_index=tuple(sentence_index))
