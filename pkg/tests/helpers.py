"""Shared construction helpers for the test modules."""

import numpy as np

from plsakit.corpus import Corpus, CountMatrix, Document
from plsakit.plsa import PlsaModel, init_model


def make_model(p_z, p_d_z, p_w_z):
    """Build a PlsaModel from plain nested lists."""
    p_z = np.asarray(p_z, dtype=np.float64)
    p_d_z = np.asarray(p_d_z, dtype=np.float64)
    p_w_z = np.asarray(p_w_z, dtype=np.float64)
    return PlsaModel(
        k=len(p_z), p_z=p_z, p_d_given_z=p_d_z, p_w_given_z=p_w_z,
        n_docs=p_d_z.shape[1], n_words=p_w_z.shape[1],
    )


def random_model(n_docs, n_words, k, seed):
    return init_model(n_docs, n_words, k, seed)


def random_counts(n_docs, n_words, seed, density=0.4, max_count=5):
    """A random sparse CountMatrix with at least one entry."""
    rng = np.random.default_rng(seed)
    entries = {}
    for d in range(n_docs):
        for w in range(n_words):
            if rng.random() < density:
                entries[(d, w)] = int(rng.integers(1, max_count + 1))
    if not entries:
        entries[(0, 0)] = 1
    return CountMatrix(n_docs=n_docs, n_words=n_words, entries=entries)


def toy_corpus():
    """Six tiny documents over two categories with distinct word usage."""
    docs = [
        Document("news/a.txt", "news", ["pasar", "saham", "modal", "pasar"]),
        Document("news/b.txt", "news", ["saham", "modal", "bank"]),
        Document("news/c.txt", "news", ["pasar", "bank", "modal"]),
        Document("sport/d.txt", "sport", ["gol", "bola", "liga", "gol"]),
        Document("sport/e.txt", "sport", ["bola", "liga", "klub"]),
        Document("sport/f.txt", "sport", ["gol", "klub", "liga"]),
    ]
    return Corpus.from_documents(docs)


def write_tree(corpus, root):
    """Write a corpus as <root>/<category>/<name> text files."""
    for doc in corpus.documents:
        _, filename = doc.id.split("/", 1)
        target = root / doc.category
        target.mkdir(parents=True, exist_ok=True)
        (target / filename).write_text(" ".join(doc.tokens) + "\n", encoding="utf-8")
