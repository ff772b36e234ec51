"""Synthetic labeled corpora with planted per-category word distributions.

The real news corpus behind the published accuracy tables is not
distributed, so pipeline-level checks run on generated corpora instead:
each category draws tokens uniformly from its own word support, with an
optional pool of words shared by every category. Documents also carry a
synthetic source tag (the analog of drawing articles from several
outlets) used purely for balance reporting.
"""

import string
from collections import Counter
from pathlib import Path

import numpy as np

from .corpus import Corpus, Document

DEFAULT_SOURCES = ("sumbera", "sumberb", "sumberc")

_LETTERS = string.ascii_lowercase


def _word_for_index(idx):
    # 'zz' prefix keeps generated words clear of any realistic stoplist.
    digits = []
    n = idx
    for _ in range(3):
        digits.append(_LETTERS[n % 26])
        n //= 26
    if n:
        raise ValueError(f"word index {idx} too large for the 3-letter alphabet")
    return "zz" + "".join(reversed(digits))


def make_synthetic_corpus(
    n_categories=4,
    words_per_category=15,
    shared_fraction=0.0,
    train_per_category=75,
    test_per_category=25,
    doc_length=(30, 60),
    seed=0,
    category_names=None,
    sources=DEFAULT_SOURCES,
    source_weights=None,
):
    """Generate (train corpus, test corpus) from planted word distributions.

    Each category's support holds `words_per_category` words, of which
    round(shared_fraction * words_per_category) come from one pool common
    to all categories; the rest are exclusive. Tokens are drawn uniformly
    over the support. shared_fraction = 0 plants fully disjoint topic
    vocabularies. Deterministic for a fixed seed.
    """
    if n_categories < 1:
        raise ValueError("n_categories must be >= 1")
    if not 0.0 <= shared_fraction <= 1.0:
        raise ValueError("shared_fraction must lie in [0, 1]")
    if words_per_category < 1:
        raise ValueError("words_per_category must be >= 1")
    if category_names is None:
        category_names = [f"cat{i:02d}" for i in range(n_categories)]
    elif len(category_names) != n_categories:
        raise ValueError("category_names length must equal n_categories")
    lo, hi = (doc_length, doc_length) if isinstance(doc_length, int) else doc_length
    if lo < 1 or hi < lo:
        raise ValueError(f"bad doc_length range ({lo}, {hi})")
    sources = list(sources)
    if source_weights is None:
        weights = np.full(len(sources), 1.0 / len(sources))
    else:
        weights = np.asarray(source_weights, dtype=np.float64)
        if len(weights) != len(sources) or np.any(weights < 0) or weights.sum() <= 0:
            raise ValueError("source_weights must be nonnegative, one per source")
        weights = weights / weights.sum()

    n_shared = round(words_per_category * shared_fraction)
    n_exclusive = words_per_category - n_shared
    shared_words = [_word_for_index(i) for i in range(n_shared)]
    supports = []
    next_idx = n_shared
    for _ in range(n_categories):
        exclusive = [_word_for_index(next_idx + j) for j in range(n_exclusive)]
        next_idx += n_exclusive
        supports.append(shared_words + exclusive)

    rng = np.random.default_rng(seed)

    def sample_doc(category, support, serial):
        length = int(rng.integers(lo, hi + 1))
        tokens = [support[j] for j in rng.integers(0, len(support), size=length)]
        source = sources[int(rng.choice(len(sources), p=weights))]
        doc_id = f"{category}/{source}-{serial:04d}.txt"
        return Document(id=doc_id, category=category, tokens=tokens)

    train_docs, test_docs = [], []
    for c, category in enumerate(category_names):
        for serial in range(train_per_category):
            train_docs.append(sample_doc(category, supports[c], serial))
        for serial in range(train_per_category, train_per_category + test_per_category):
            test_docs.append(sample_doc(category, supports[c], serial))
    return Corpus.from_documents(train_docs), Corpus.from_documents(test_docs)


def write_corpus_tree(corpus, root):
    """Write one text file per document under <root>/<category>/."""
    root = Path(root)
    for doc in corpus.documents:
        _, filename = doc.id.split("/", 1)
        target_dir = root / doc.category
        target_dir.mkdir(parents=True, exist_ok=True)
        (target_dir / filename).write_text(" ".join(doc.tokens) + "\n", encoding="utf-8")


def source_balance(corpus):
    """Count documents per (category, source) from generated document ids.

    Source tags are the filename prefix before the first '-'; this is
    only meaningful for corpora produced by make_synthetic_corpus.
    """
    counts = Counter()
    for doc in corpus.documents:
        filename = doc.id.split("/", 1)[-1]
        source = filename.split("-", 1)[0]
        counts[(doc.category, source)] += 1
    return [
        (category, source, count)
        for (category, source), count in sorted(counts.items())
    ]
