"""Project unseen documents into topic space without retraining.

Each test token found in the training vocabulary is looked up as a topic
posterior P(z|w); the document vector is the average of those per-token
posteriors. Out-of-vocabulary tokens are dropped. No EM runs here.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .plsa import EPS

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TopicFeatureVector:
    """A K-dimensional topic distribution for one folded-in document.

    n_matched counts the test token occurrences found in the training
    vocabulary; n_matched == 0 marks the uniform fallback.
    """

    probs: np.ndarray
    n_matched: int
    n_total: int

    @property
    def is_fallback(self):
        return self.n_matched == 0


def word_topic_posterior(model, w):
    """P(z|w), the normalization of P(z)P(w|z) over topics."""
    if not (0 <= w < model.n_words):
        raise IndexError(f"word index {w} outside [0, {model.n_words})")
    numer = model.p_z * model.p_w_given_z[:, w]
    denom = numer.sum()
    if denom < EPS:
        return np.full(model.k, 1.0 / model.k)
    return numer / denom


def fold_in(model, vocab, doc, by_occurrence=True):
    """Average the per-word topic posteriors of a document's known tokens.

    With by_occurrence (the default) repeated tokens contribute once per
    occurrence; with by_occurrence=False each distinct token contributes
    once. A document with no in-vocabulary tokens gets the uniform
    vector and a warning.
    """
    tokens = doc.tokens if by_occurrence else sorted(set(doc.tokens))
    total = np.zeros(model.k)
    matched = 0
    for tok in tokens:
        idx = vocab.index.get(tok)
        if idx is None:
            continue
        total += word_topic_posterior(model, idx)
        matched += 1
    if matched == 0:
        log.warning("document %s has no in-vocabulary tokens; uniform fold-in", doc.id)
        probs = np.full(model.k, 1.0 / model.k)
    else:
        probs = total / matched
    return TopicFeatureVector(probs=probs, n_matched=matched, n_total=len(tokens))


def fold_in_corpus(model, vocab, corpus, by_occurrence=True):
    """Fold in every document, returning (feature vector, category) pairs in order."""
    return [
        (fold_in(model, vocab, doc, by_occurrence=by_occurrence), doc.category)
        for doc in corpus.documents
    ]


def write_features_csv(path, corpus, vectors):
    """Write labeled fold-in vectors as doc_id,category,n_matched,n_total,p_z1..p_zK."""
    if len(corpus.documents) != len(vectors):
        raise ValueError("corpus and feature list lengths differ")
    k = len(vectors[0][0].probs) if vectors else 0
    header = ["doc_id", "category", "n_matched", "n_total"] + [
        f"p_z{z + 1}" for z in range(k)
    ]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for doc, (vec, category) in zip(corpus.documents, vectors):
            writer.writerow(
                [doc.id, category, vec.n_matched, vec.n_total]
                + [repr(float(p)) for p in vec.probs]
            )


def read_features_csv(path):
    """Read a features CSV back into (doc_ids, feature vectors, labels)."""
    doc_ids, vectors, labels = [], [], []
    path = Path(path)
    if not path.is_file():
        raise DataError(f"features CSV not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:4] != ["doc_id", "category", "n_matched", "n_total"]:
            raise DataError(f"unrecognized features CSV header in {path}")
        for row in reader:
            doc_ids.append(row[0])
            labels.append(row[1])
            probs = np.array([float(v) for v in row[4:]])
            vectors.append(
                TopicFeatureVector(
                    probs=probs, n_matched=int(row[2]), n_total=int(row[3])
                )
            )
    return doc_ids, vectors, labels
