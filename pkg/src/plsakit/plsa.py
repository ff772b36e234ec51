"""The aspect model: three probability tables trained by EM.

A model holds P(z), P(d|z), and P(w|z). Training alternates the
posterior computation P(z|d,w) with the count-weighted re-estimation of
the three tables, for a fixed number of sweeps. Posteriors are never
materialized as a dense tensor; they are recomputed per nonzero count
cell inside each sweep.
"""

import logging
from collections import namedtuple
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .errors import DataError, NumericError

log = logging.getLogger(__name__)

# Underflow guard for posterior denominators and log arguments.
EPS = 1e-300

MODEL_FORMAT_VERSION = "v1"


@dataclass(frozen=True)
class PlsaModel:
    """Probability tables for K topics over D documents and W words.

    p_z has shape (K,); p_d_given_z and p_w_given_z are stored per topic
    with shapes (K, D) and (K, W). Each topic row sums to 1, as does p_z.
    """

    k: int
    p_z: np.ndarray
    p_d_given_z: np.ndarray
    p_w_given_z: np.ndarray
    n_docs: int
    n_words: int

    def validate(self, tol=1e-10):
        """Check the normalization and range invariants; raise on violation."""
        for name, table in (
            ("p_z", self.p_z),
            ("p_d_given_z", self.p_d_given_z),
            ("p_w_given_z", self.p_w_given_z),
        ):
            if not np.all(np.isfinite(table)):
                raise NumericError(f"{name} contains non-finite values")
            if np.any(table < 0) or np.any(table > 1):
                raise ValueError(f"{name} has entries outside [0, 1]")
        if abs(self.p_z.sum() - 1.0) > tol:
            raise ValueError("p_z does not sum to 1")
        for name, table in (
            ("p_d_given_z", self.p_d_given_z),
            ("p_w_given_z", self.p_w_given_z),
        ):
            err = np.abs(table.sum(axis=1) - 1.0).max()
            if err > tol:
                raise ValueError(f"{name} rows do not sum to 1 (max error {err:.3e})")


@dataclass(frozen=True)
class PosteriorSlice:
    """The topic posterior P(z|d,w) for one (document, word) cell."""

    doc: int
    word: int
    probs: np.ndarray

    @classmethod
    def compute(cls, model, d, w):
        return cls(doc=d, word=w, probs=e_step_posterior(model, d, w))


@dataclass(frozen=True)
class TrainingTrace:
    """Per-sweep (iteration index, log-likelihood) pairs, 1-based."""

    entries: list

    @property
    def log_likelihoods(self):
        return [ll for _, ll in self.entries]

    def __len__(self):
        return len(self.entries)


def init_model(n_docs, n_words, k, seed):
    """Seeded-uniform random tables, normalized along the constrained axis.

    Every entry is strictly positive; identical arguments always produce
    an identical model.
    """
    if n_docs < 1 or n_words < 1 or k < 1:
        raise ValueError("n_docs, n_words, and k must all be >= 1")
    rng = np.random.default_rng(seed)

    def positive_uniform(shape):
        # 1 - U[0,1) lies in (0, 1], so normalized rows stay strictly positive.
        return 1.0 - rng.random(shape)

    p_z = positive_uniform(k)
    p_z /= p_z.sum()
    p_d_z = positive_uniform((k, n_docs))
    p_d_z /= p_d_z.sum(axis=1, keepdims=True)
    p_w_z = positive_uniform((k, n_words))
    p_w_z /= p_w_z.sum(axis=1, keepdims=True)
    return PlsaModel(
        k=k, p_z=p_z, p_d_given_z=p_d_z, p_w_given_z=p_w_z,
        n_docs=n_docs, n_words=n_words,
    )


def _check_indices(model, d, w):
    if not (0 <= d < model.n_docs):
        raise IndexError(f"document index {d} outside [0, {model.n_docs})")
    if not (0 <= w < model.n_words):
        raise IndexError(f"word index {w} outside [0, {model.n_words})")


def _check_dims(model, counts):
    if model.n_docs != counts.n_docs or model.n_words != counts.n_words:
        raise ValueError(
            f"model is {model.n_docs}x{model.n_words} but counts are "
            f"{counts.n_docs}x{counts.n_words}"
        )


def e_step_posterior(model, d, w):
    """Topic posterior P(z|d,w), proportional to P(z)P(d|z)P(w|z).

    Falls back to the uniform vector when the normalizer underflows.
    """
    _check_indices(model, d, w)
    numer = model.p_z * model.p_d_given_z[:, d] * model.p_w_given_z[:, w]
    denom = numer.sum()
    if denom < EPS:
        return np.full(model.k, 1.0 / model.k)
    return numer / denom


def m_step(model, counts):
    """One re-estimation sweep over the nonzero count cells.

    Posteriors are computed on the fly from the current model; the three
    accumulators are then normalized into a fresh model. Accumulation
    runs in the fixed (doc, word) order of the count matrix, so results
    are bit-identical across reruns and thread counts.
    """
    _check_dims(model, counts)
    if counts.nnz == 0:
        raise ValueError("count matrix has no entries, nothing to normalize")
    rows, cols, vals = counts.docs, counts.words, counts.counts

    numer = (
        model.p_z[:, None]
        * model.p_d_given_z[:, rows]
        * model.p_w_given_z[:, cols]
    )  # (K, nnz)
    denom = numer.sum(axis=0)
    safe = denom >= EPS
    post = np.empty_like(numer)
    np.divide(numer, denom, out=post, where=safe)
    post[:, ~safe] = 1.0 / model.k

    weighted = post * vals  # n(d,w) * P(z|d,w), shape (K, nnz)
    k, n_docs, n_words = model.k, model.n_docs, model.n_words
    d_acc = np.empty((k, n_docs))
    w_acc = np.empty((k, n_words))
    for z in range(k):
        d_acc[z] = np.bincount(rows, weights=weighted[z], minlength=n_docs)
        w_acc[z] = np.bincount(cols, weights=weighted[z], minlength=n_words)
    z_acc = weighted.sum(axis=1)

    total = z_acc.sum()
    if total < EPS:
        raise NumericError("all posterior mass vanished during the M-step")
    p_z = z_acc / total
    # Per-topic masses can be zero if a topic dies; keep its row at zero.
    d_norm = d_acc.sum(axis=1, keepdims=True)
    w_norm = w_acc.sum(axis=1, keepdims=True)
    p_d_z = np.divide(d_acc, d_norm, out=np.zeros_like(d_acc), where=d_norm >= EPS)
    p_w_z = np.divide(w_acc, w_norm, out=np.zeros_like(w_acc), where=w_norm >= EPS)
    return PlsaModel(
        k=k, p_z=p_z, p_d_given_z=p_d_z, p_w_given_z=p_w_z,
        n_docs=n_docs, n_words=n_words,
    )


def log_likelihood(model, counts):
    """Sum of n(d,w) * log P(d,w) over the stored cells, clamped at EPS."""
    _check_dims(model, counts)
    rows, cols, vals = counts.docs, counts.words, counts.counts
    joint = (
        model.p_z[:, None]
        * model.p_d_given_z[:, rows]
        * model.p_w_given_z[:, cols]
    ).sum(axis=0)
    ll = float(np.dot(vals, np.log(np.maximum(joint, EPS))))
    if not np.isfinite(ll):
        raise NumericError("log-likelihood is not finite")
    return ll


def joint_probability(model, d, w):
    """P(d,w) in the symmetric form, summing P(z)P(d|z)P(w|z) over topics."""
    _check_indices(model, d, w)
    return float(
        np.dot(model.p_z * model.p_d_given_z[:, d], model.p_w_given_z[:, w])
    )


def joint_probability_asymmetric(model, d, w):
    """P(d,w) as P(d) * sum_z P(w|z) P(z|d), the cross-check evaluation.

    P(d) is the derived marginal sum_z P(z)P(d|z); P(z|d) is its
    normalized integrand. Agrees with joint_probability to float error.
    """
    _check_indices(model, d, w)
    weights = model.p_z * model.p_d_given_z[:, d]
    p_d = weights.sum()
    if p_d < EPS:
        return 0.0
    p_z_given_d = weights / p_d
    return float(p_d * np.dot(model.p_w_given_z[:, w], p_z_given_d))


def train(counts, k, iterations, seed, tol=None):
    """Run exactly `iterations` EM sweeps from a seeded random start.

    Returns the final model and the trace of log-likelihoods evaluated
    after each sweep. When `tol` is given, training may stop early once
    the relative likelihood change drops below it (off by default: the
    experiment protocol fixes the iteration count).
    """
    if counts.nnz == 0:
        raise ValueError("count matrix has no entries")
    if k < 1:
        raise ValueError("k must be >= 1")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    model = init_model(counts.n_docs, counts.n_words, k, seed)
    entries = []
    prev_ll = None
    for i in range(1, iterations + 1):
        model = m_step(model, counts)
        ll = log_likelihood(model, counts)
        entries.append((i, ll))
        if tol is not None and prev_ll is not None:
            if abs(ll - prev_ll) <= tol * abs(prev_ll):
                break
        prev_ll = ll
    return model, TrainingTrace(entries=entries)


def doc_topic_features(model):
    """Per-document topic mixture P(z|d), shape (D, K), rows summing to 1.

    Row d normalizes P(z)P(d|z) over topics. Documents with zero mass
    (possible only for zero-count documents) get the uniform row.
    """
    numer = (model.p_z[:, None] * model.p_d_given_z).T  # (D, K)
    norms = numer.sum(axis=1, keepdims=True)
    zero_rows = norms[:, 0] < EPS
    if zero_rows.any():
        log.warning(
            "%d document(s) have zero topic mass; using uniform features",
            int(zero_rows.sum()),
        )
    features = np.divide(numer, norms, out=np.full_like(numer, 1.0 / model.k),
                         where=~zero_rows[:, None])
    return features


def parameter_count(n_docs, n_words, k):
    """Entries in the two reduced tables, D*K + W*K.

    This is the published accounting, which leaves out the K entries of
    P(z) itself.
    """
    if n_docs < 1 or n_words < 1 or k < 1:
        raise ValueError("n_docs, n_words, and k must all be >= 1")
    return n_docs * k + n_words * k


def _format_row(values):
    return " ".join(repr(float(v)) for v in values)


def save_model(path, model, vocab, seed, iterations):
    """Write the versioned text format: header, vocabulary, three tables.

    Values are written with full round-trip precision; load_model
    restores them exactly.
    """
    if len(vocab) != model.n_words:
        raise ValueError(
            f"vocabulary size {len(vocab)} does not match model n_words {model.n_words}"
        )
    lines = [
        f"PLSA {MODEL_FORMAT_VERSION} K={model.k} D={model.n_docs} "
        f"W={model.n_words} seed={seed} iters={iterations}"
    ]
    lines.extend(vocab.words)
    lines.append(_format_row(model.p_z))
    for z in range(model.k):
        lines.append(_format_row(model.p_w_given_z[z]))
    for z in range(model.k):
        lines.append(_format_row(model.p_d_given_z[z]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


LoadedModel = namedtuple("LoadedModel", ["model", "vocab", "seed", "iterations"])


def load_model(path):
    """Parse a saved model file back into (model, vocab, seed, iterations)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise DataError(f"model file not found: {path}")
    except UnicodeDecodeError:
        raise DataError(f"model file is not valid UTF-8: {path}")
    if not lines:
        raise DataError(f"model file is empty: {path}")
    header = lines[0].split()
    if len(header) != 7 or header[0] != "PLSA" or header[1] != MODEL_FORMAT_VERSION:
        raise DataError(f"unrecognized model header: {lines[0]!r}")
    try:
        meta = dict(part.split("=", 1) for part in header[2:])
        k = int(meta["K"])
        n_docs = int(meta["D"])
        n_words = int(meta["W"])
        seed = int(meta["seed"])
        iterations = int(meta["iters"])
    except (KeyError, ValueError):
        raise DataError(f"malformed model header: {lines[0]!r}")
    expected = 1 + n_words + 1 + 2 * k
    if len(lines) < expected:
        raise DataError(f"model file truncated: {len(lines)} lines, expected {expected}")
    words = lines[1 : 1 + n_words]
    pos = 1 + n_words

    def parse_row(line, width, what):
        parts = line.split()
        if len(parts) != width:
            raise DataError(f"{what} row has {len(parts)} values, expected {width}")
        return np.array([float(p) for p in parts])

    p_z = parse_row(lines[pos], k, "P(z)")
    pos += 1
    p_w_z = np.stack([parse_row(lines[pos + z], n_words, "P(w|z)") for z in range(k)])
    pos += k
    p_d_z = np.stack([parse_row(lines[pos + z], n_docs, "P(d|z)") for z in range(k)])
    model = PlsaModel(
        k=k, p_z=p_z, p_d_given_z=p_d_z, p_w_given_z=p_w_z,
        n_docs=n_docs, n_words=n_words,
    )
    model.validate(tol=1e-9)
    return LoadedModel(model=model, vocab=Vocabulary(words=words), seed=seed,
                       iterations=iterations)
