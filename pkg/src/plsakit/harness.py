"""Experiment grid driver: per-cell pipeline runs, aggregation, reports.

A grid cell is one (train size, topic count, iterations, repeat,
classifier) configuration. Every cell is a pure function of its inputs
and a seed derived from a documented hash, so any cell can be re-run in
isolation and grids are reproducible regardless of parallelism.

The published accuracy tables ship as a bundled fixture so the
aggregate analyses can be reproduced exactly even though the original
news corpus is not distributed.
"""

import csv
import hashlib
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import classify, foldin, plsa
from .corpus import build_count_matrix, build_vocabulary, split_train_test
from .errors import DataError, NumericError

log = logging.getLogger(__name__)

REFERENCE_TABLES_RESOURCE = "reference_tables.csv"

REPORT_HEADER = [
    "train_size", "topics", "iterations", "repeat", "classifier",
    "accuracy_pct", "seconds",
]

SUMMARY_AXES = ("train_size", "topic_count", "iterations", "classifier")

# EM restarts per cell; the best final training likelihood wins.
DEFAULT_RESTARTS = 5


@dataclass(frozen=True)
class ExperimentConfig:
    """Axis values for a grid run; defaults mirror the published protocol."""

    topic_counts: tuple = (3, 4, 5)
    iteration_counts: tuple = (1, 3, 5, 7, 9, 10, 20)
    train_sizes: tuple = (400, 700, 1000)
    repeats: int = 2
    classifiers: tuple = ("svm", "logistic")
    base_seed: int = 0

    def __post_init__(self):
        for name in ("topic_counts", "iteration_counts", "train_sizes", "classifiers"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        for clf in self.classifiers:
            if clf not in ("svm", "logistic"):
                raise ValueError(f"unknown classifier kind {clf!r}")

    def n_cells(self):
        return (
            len(self.train_sizes) * len(self.topic_counts)
            * len(self.iteration_counts) * self.repeats * len(self.classifiers)
        )


@dataclass(frozen=True)
class CellResult:
    """One grid cell: its coordinates, accuracy, and wall time."""

    train_size: int
    topics: int
    iterations: int
    repeat: int
    classifier: str
    accuracy_pct: float
    seconds: float = None


@dataclass(frozen=True)
class ExperimentReport:
    cells: list
    metadata: dict = field(default_factory=dict)


def derive_seed(base_seed, *parts):
    """Stable 32-bit seed from the base seed and cell coordinates.

    sha256 over 'plsakit|<base>|<part>|...' with parts stringified; the
    first four bytes (big-endian) become the seed. Platform-independent.
    """
    text = "plsakit|" + "|".join(str(p) for p in (base_seed, *parts))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def cell_seed(base_seed, train_size, k, iterations, repeat):
    """The documented per-cell seed; the classifier kind is deliberately
    excluded so both classifiers in a cell pair score the same trained model."""
    return derive_seed(base_seed, "cell", train_size, k, iterations, repeat)


def corpus_fingerprint(corpus):
    """Short content hash over document ids and token streams."""
    h = hashlib.sha256()
    for doc in corpus.documents:
        h.update(doc.id.encode("utf-8"))
        h.update(b"\x00")
        h.update(" ".join(doc.tokens).encode("utf-8"))
        h.update(b"\x01")
    return h.hexdigest()[:16]


def run_cell(train, test, k, iterations, classifier_kind, seed, min_count=1,
             restarts=DEFAULT_RESTARTS):
    """Train the full pipeline on one configuration and score the test set.

    Vocabulary and counts come from the training corpus only; test
    documents are folded in against the trained model. Returns the test
    accuracy percentage at full precision.

    EM is run `restarts` times from seeds derived from the cell seed and
    the model with the highest final training log-likelihood is kept
    (first best wins ties). Selection looks only at training data, and
    the whole procedure stays a pure function of (corpora, parameters,
    seed).
    """
    if classifier_kind not in ("svm", "logistic"):
        raise ValueError(f"unknown classifier kind {classifier_kind!r}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    vocab = build_vocabulary(train, min_count=min_count)
    counts = build_count_matrix(train, vocab)
    model, best_ll = None, None
    for r in range(restarts):
        candidate, trace = plsa.train(
            counts, k, iterations, derive_seed(seed, "restart", r)
        )
        ll = trace.log_likelihoods[-1]
        if best_ll is None or ll > best_ll:
            model, best_ll = candidate, ll
    train_features = plsa.doc_topic_features(model)
    data = classify.LabeledFeatures.from_pairs(
        [(train_features[i], doc.category) for i, doc in enumerate(train.documents)]
    )
    if classifier_kind == "logistic":
        clf = classify.train_logistic(data, seed=seed)
    else:
        clf = classify.train_linear_svm(data, seed=seed)
    test_pairs = foldin.fold_in_corpus(model, vocab, test)
    predictions = [classify.predict(clf, vec.probs) for vec, _ in test_pairs]
    gold = [category for _, category in test_pairs]
    acc = classify.accuracy(predictions, gold)
    if not math.isfinite(acc):
        raise NumericError("cell accuracy is not finite")
    return acc


def _run_cell_task(task):
    train, test, size, k, iters, repeat, clf_kind, seed, restarts = task
    started = time.perf_counter()
    acc = run_cell(train, test, k, iters, clf_kind, seed, restarts=restarts)
    return CellResult(
        train_size=size, topics=k, iterations=iters, repeat=repeat,
        classifier=clf_kind, accuracy_pct=acc,
        seconds=time.perf_counter() - started,
    )


def run_grid(config, train_pool, test, jobs=1, restarts=DEFAULT_RESTARTS):
    """Run every cell of the grid over subsets of the training pool.

    Each train size takes a stratified subset of the pool (seeded from
    the base seed and the size, so subsets nest across sizes). Cells run
    independently, serially or across `jobs` worker processes; the report
    row order follows the config axes either way.
    """
    categories = sorted(train_pool.categories)
    if not categories:
        raise ValueError("training pool has no categories")
    n_cat = len(categories)
    subsets = {}
    for size in config.train_sizes:
        if size % n_cat != 0:
            raise ValueError(
                f"train size {size} is not divisible by the {n_cat} categories"
            )
        subset, _ = split_train_test(
            train_pool, size // n_cat, 0, derive_seed(config.base_seed, "subset", size)
        )
        subsets[size] = subset

    tasks = []
    for size in config.train_sizes:
        for k in config.topic_counts:
            for iters in config.iteration_counts:
                for repeat in range(1, config.repeats + 1):
                    seed = cell_seed(config.base_seed, size, k, iters, repeat)
                    for clf_kind in config.classifiers:
                        tasks.append(
                            (subsets[size], test, size, k, iters, repeat,
                             clf_kind, seed, restarts)
                        )

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_run_cell_task, tasks))
    else:
        cells = [_run_cell_task(task) for task in tasks]

    metadata = {
        "base_seed": config.base_seed,
        "train_pool_fingerprint": corpus_fingerprint(train_pool),
        "test_fingerprint": corpus_fingerprint(test),
        "categories": categories,
    }
    return ExperimentReport(cells=cells, metadata=metadata)


def display_percent(value):
    """Nearest-integer percent for display; ties round half up."""
    return int(math.floor(value + 0.5))


def summarize(cells, axis):
    """Mean accuracy grouped by one axis, as (axis value, mean) pairs.

    Numeric axes come back in ascending order; the classifier axis keeps
    first-appearance order. Means stay at full precision; use
    display_percent for table-style output.
    """
    cells = list(cells)
    if not cells:
        raise ValueError("no cells to summarize")
    key_fn = {
        "train_size": lambda c: c.train_size,
        "topic_count": lambda c: c.topics,
        "iterations": lambda c: c.iterations,
        "classifier": lambda c: c.classifier,
    }.get(axis)
    if key_fn is None:
        raise ValueError(f"unknown axis {axis!r}; expected one of {SUMMARY_AXES}")
    groups = {}
    order = []
    for cell in cells:
        key = key_fn(cell)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(cell.accuracy_pct)
    if axis != "classifier":
        order = sorted(order)
    return [(key, float(np.mean(groups[key]))) for key in order]


def emit_report(report, path):
    """Write the cell list as CSV with a stable, config-ordered row layout.

    Accuracy and wall time keep full round-trip precision so that
    parse_report reproduces the cells exactly.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_HEADER)
        for cell in report.cells:
            writer.writerow([
                cell.train_size, cell.topics, cell.iterations, cell.repeat,
                cell.classifier, repr(float(cell.accuracy_pct)),
                "" if cell.seconds is None else repr(float(cell.seconds)),
            ])


def _parse_cell_rows(rows, origin):
    cells = []
    for row in rows:
        if len(row) not in (6, 7):
            raise DataError(f"malformed report row in {origin}: {row!r}")
        seconds = None
        if len(row) == 7 and row[6] != "":
            seconds = float(row[6])
        cells.append(CellResult(
            train_size=int(row[0]), topics=int(row[1]), iterations=int(row[2]),
            repeat=int(row[3]), classifier=row[4],
            accuracy_pct=float(row[5]), seconds=seconds,
        ))
    return cells


def parse_report(path):
    """Read a report CSV back into an ExperimentReport (cells only)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"report file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:6] != REPORT_HEADER[:6]:
            raise DataError(f"unrecognized report header in {path}: {header!r}")
        cells = _parse_cell_rows(reader, path)
    return ExperimentReport(cells=cells)


def load_reference_tables():
    """The bundled transcription of the published accuracy tables.

    252 cells: 3 train sizes x 3 topic counts x 7 iteration counts x
    2 repeats x 2 classifiers, accuracies in integer percent.
    """
    text = (
        resources.files("plsakit.data")
        .joinpath(REFERENCE_TABLES_RESOURCE)
        .read_text(encoding="utf-8")
    )
    rows = list(csv.reader(text.splitlines()))
    return _parse_cell_rows(rows[1:], REFERENCE_TABLES_RESOURCE)


def load_config_file(path):
    """Parse a key=value config file into a flat string dict.

    One pair per line; '#' starts a comment; keys use the CLI flag names
    without the leading dashes (underscores and dashes both accepted).
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"config file not found: {path}")
    values = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("_", "-")] = value.strip()
    return values
