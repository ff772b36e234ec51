"""Corpus ingestion: tokenization, stopword removal, vocabulary, counts.

Documents live in a directory tree ``<root>/<category>/<docname>.txt``
(UTF-8). Preprocessing is tokenize -> remove stopwords; the surviving
tokens feed the sparse term-document count matrix.
"""

import logging
import random
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError

log = logging.getLogger(__name__)

DEFAULT_STOPLIST_RESOURCE = "stopwords_id.txt"


@dataclass(frozen=True)
class Document:
    """One preprocessed document: unique id, category label, token list."""

    id: str
    category: str
    tokens: list


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of labeled documents."""

    documents: list
    categories: set

    def __len__(self):
        return len(self.documents)

    def by_category(self):
        """Map category label -> list of documents, preserving order."""
        groups = {}
        for doc in self.documents:
            groups.setdefault(doc.category, []).append(doc)
        return groups

    @classmethod
    def from_documents(cls, documents):
        ids = [d.id for d in documents]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate document ids in corpus")
        return cls(documents=list(documents), categories={d.category for d in documents})


@dataclass(frozen=True)
class Vocabulary:
    """Bijection between distinct words and contiguous integer indices."""

    words: list
    index: dict = field(default=None)

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})
        if len(self.index) != len(self.words):
            raise ValueError("vocabulary words are not distinct")

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index


class CountMatrix:
    """Sparse nonnegative counts n(d, w); zero cells are absent, not stored.

    Internally held as coordinate arrays sorted by (doc, word) so that
    accumulation order is fixed and reruns are bit-identical.
    """

    def __init__(self, n_docs, n_words, entries):
        self.n_docs = int(n_docs)
        self.n_words = int(n_words)
        items = sorted(entries.items())
        for (d, w), c in items:
            if not (0 <= d < self.n_docs and 0 <= w < self.n_words):
                raise ValueError(f"entry ({d},{w}) outside {self.n_docs}x{self.n_words}")
            if c < 1 or c != int(c):
                raise ValueError(f"count at ({d},{w}) must be a positive integer, got {c}")
        self.docs = np.array([d for (d, _), _ in items], dtype=np.int64)
        self.words = np.array([w for (_, w), _ in items], dtype=np.int64)
        self.counts = np.array([c for _, c in items], dtype=np.float64)

    @property
    def nnz(self):
        return len(self.counts)

    @property
    def entries(self):
        """Dict view (doc, word) -> count of the stored nonzero cells."""
        return {
            (int(d), int(w)): int(c)
            for d, w, c in zip(self.docs, self.words, self.counts)
        }

    def total(self):
        """Total token mass, i.e. the sum of all stored counts."""
        return float(self.counts.sum())

    def __eq__(self, other):
        if not isinstance(other, CountMatrix):
            return NotImplemented
        return (
            self.n_docs == other.n_docs
            and self.n_words == other.n_words
            and np.array_equal(self.docs, other.docs)
            and np.array_equal(self.words, other.words)
            and np.array_equal(self.counts, other.counts)
        )


def tokenize(text):
    """Split text into lowercased maximal runs of Unicode letters.

    Digits, punctuation, and whitespace all act as separators and are
    discarded, so e.g. "DPR-RI 2014" yields ["dpr", "ri"].
    """
    tokens = []
    current = []
    for ch in text:
        if unicodedata.category(ch).startswith("L"):
            current.append(ch)
        elif current:
            tokens.append("".join(current).lower())
            current = []
    if current:
        tokens.append("".join(current).lower())
    return tokens


def remove_stopwords(tokens, stoplist):
    """Drop every token present in stoplist, keeping order."""
    stoplist = set(stoplist)
    return [t for t in tokens if t not in stoplist]


def load_stoplist(path=None):
    """Read a stoplist file: one lowercase word per line, # comments ignored.

    With no path, the bundled default Indonesian list is used.
    """
    if path is None:
        text = (
            resources.files("plsakit.data")
            .joinpath(DEFAULT_STOPLIST_RESOURCE)
            .read_text(encoding="utf-8")
        )
    else:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise DataError(f"stoplist file not found: {path}")
        except UnicodeDecodeError:
            raise DataError(f"stoplist file is not valid UTF-8: {path}")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return words


def load_corpus(root_path, stoplist):
    """Load ``<root>/<category>/<file>`` into a preprocessed Corpus.

    Document ids are ``category/filename``; ordering is lexicographic by
    id, so identical trees always load identically. Documents left empty
    by preprocessing are kept (they contribute no counts) with a warning.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise DataError(f"corpus root is not a directory: {root}")
    category_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not category_dirs:
        raise DataError(f"corpus root has no category subdirectories: {root}")
    stoplist = set(stoplist)
    documents = []
    for cat_dir in category_dirs:
        category = cat_dir.name
        for file in sorted(cat_dir.iterdir()):
            if not file.is_file() or file.name.startswith("."):
                continue
            try:
                text = file.read_text(encoding="utf-8")
            except UnicodeDecodeError:
                raise DataError(f"file is not valid UTF-8: {file}")
            except OSError as exc:
                raise DataError(f"cannot read file {file}: {exc}")
            tokens = remove_stopwords(tokenize(text), stoplist)
            doc_id = f"{category}/{file.name}"
            if not tokens:
                log.warning("document %s has no tokens after preprocessing", doc_id)
            documents.append(Document(id=doc_id, category=category, tokens=tokens))
    documents.sort(key=lambda d: d.id)
    return Corpus.from_documents(documents)


def build_vocabulary(corpus, min_count=1):
    """Collect words with total corpus count >= min_count, in first-appearance order."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    totals = Counter()
    order = []
    seen = set()
    for doc in corpus.documents:
        for tok in doc.tokens:
            totals[tok] += 1
            if tok not in seen:
                seen.add(tok)
                order.append(tok)
    words = [w for w in order if totals[w] >= min_count]
    return Vocabulary(words=words)


def build_count_matrix(corpus, vocab):
    """Count in-vocabulary token occurrences per document; OOV tokens are skipped."""
    entries = {}
    for d, doc in enumerate(corpus.documents):
        counts = Counter(tok for tok in doc.tokens if tok in vocab)
        for tok, c in counts.items():
            entries[(d, vocab.index[tok])] = c
    return CountMatrix(n_docs=len(corpus.documents), n_words=len(vocab), entries=entries)


def split_train_test(corpus, per_category_train, per_category_test, seed):
    """Stratified disjoint split: seeded shuffle per category, then take.

    Both returned corpora are re-sorted lexicographically by document id,
    matching load_corpus ordering. Deterministic for a fixed seed.
    """
    if per_category_train < 0 or per_category_test < 0:
        raise ValueError("per-category sizes must be nonnegative")
    rng = random.Random(seed)
    train_docs, test_docs = [], []
    for category in sorted(corpus.categories):
        docs = list(corpus.by_category().get(category, []))
        need = per_category_train + per_category_test
        if len(docs) < need:
            raise ValueError(
                f"category {category!r} has {len(docs)} documents, needs {need}"
            )
        rng.shuffle(docs)
        train_docs.extend(docs[:per_category_train])
        test_docs.extend(docs[per_category_train:need])
    train_docs.sort(key=lambda d: d.id)
    test_docs.sort(key=lambda d: d.id)
    return Corpus.from_documents(train_docs), Corpus.from_documents(test_docs)
