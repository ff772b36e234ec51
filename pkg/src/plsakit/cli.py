"""Command-line interface.

Subcommands cover the full pipeline: preprocess, train, fold-in,
classify, cell, grid, summarize, gen-synth. Exit codes: 0 success,
1 usage error, 2 data/IO error, 3 numeric failure.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

from . import classify, foldin, harness, plsa, synth
from .corpus import (
    build_count_matrix,
    build_vocabulary,
    load_corpus,
    load_stoplist,
    split_train_test,
)
from .errors import DataError, NumericError
from .foldin import TopicFeatureVector

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text):
    return [int(part) for part in text.split(",") if part != ""]


def _str_list(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _float_list(text):
    return [float(part) for part in text.split(",") if part != ""]


def _doc_length(text):
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (int(lo), int(hi))
    value = int(text)
    return (value, value)


def _load_preprocessed(corpus_dir, stoplist_path):
    stoplist = load_stoplist(stoplist_path)
    return load_corpus(corpus_dir, stoplist)


def cmd_preprocess(args):
    corpus = _load_preprocessed(args.corpus, args.stoplist)
    vocab = build_vocabulary(corpus, min_count=args.min_count)
    counts = build_count_matrix(corpus, vocab)
    empty = sum(1 for doc in corpus.documents if not doc.tokens)
    print(f"documents: {len(corpus)}")
    print(f"categories: {','.join(sorted(corpus.categories))}")
    print(f"empty_documents: {empty}")
    print(f"vocabulary: {len(vocab)}")
    print(f"token_total: {int(counts.total())}")
    print(f"matrix_cells: {counts.n_docs * counts.n_words}")
    print(f"nonzero_cells: {counts.nnz}")
    if args.vocab_out:
        Path(args.vocab_out).write_text(
            "\n".join(vocab.words) + ("\n" if vocab.words else ""), encoding="utf-8"
        )
        log.info("wrote vocabulary to %s", args.vocab_out)
    return 0


def _training_feature_rows(corpus, features):
    rows = []
    for i, doc in enumerate(corpus.documents):
        n_tokens = len(doc.tokens)
        vec = TopicFeatureVector(
            probs=features[i], n_matched=n_tokens, n_total=n_tokens
        )
        rows.append((vec, doc.category))
    return rows


def cmd_train(args):
    corpus = _load_preprocessed(args.corpus, args.stoplist)
    vocab = build_vocabulary(corpus, min_count=args.min_count)
    counts = build_count_matrix(corpus, vocab)
    started = time.perf_counter()
    model, trace = plsa.train(
        counts, args.topics, args.iterations, args.seed, tol=args.tol
    )
    elapsed = time.perf_counter() - started
    for i, ll in trace.entries:
        log.info("iteration %d log-likelihood %.6f", i, ll)
    plsa.save_model(args.out, model, vocab, args.seed, args.iterations)
    print(f"trained k={args.topics} on {counts.n_docs} docs x {counts.n_words} words")
    print(f"final_log_likelihood: {trace.entries[-1][1]!r}")
    print(f"seconds: {elapsed:.3f}")
    print(f"model: {args.out}")
    if args.features_out:
        features = plsa.doc_topic_features(model)
        foldin.write_features_csv(
            args.features_out, corpus, _training_feature_rows(corpus, features)
        )
        log.info("wrote training features to %s", args.features_out)
    return 0


def cmd_fold_in(args):
    loaded = plsa.load_model(args.model)
    corpus = _load_preprocessed(args.corpus, args.stoplist)
    pairs = foldin.fold_in_corpus(
        loaded.model, loaded.vocab, corpus, by_occurrence=not args.by_types
    )
    foldin.write_features_csv(args.out, corpus, pairs)
    fallbacks = sum(1 for vec, _ in pairs if vec.is_fallback)
    print(f"folded_documents: {len(pairs)}")
    print(f"uniform_fallbacks: {fallbacks}")
    print(f"features: {args.out}")
    return 0


def cmd_classify(args):
    _, train_vecs, train_labels = foldin.read_features_csv(args.train_features)
    test_ids, test_vecs, test_labels = foldin.read_features_csv(args.test_features)
    data = classify.LabeledFeatures.from_pairs(
        [(vec.probs, label) for vec, label in zip(train_vecs, train_labels)]
    )
    if args.classifier == "logistic":
        epochs = classify.DEFAULT_LOGISTIC_EPOCHS if args.epochs is None else args.epochs
        clf = classify.train_logistic(
            data, learning_rate=args.lr, epochs=epochs, l2=args.l2, seed=args.seed
        )
    else:
        epochs = classify.DEFAULT_SVM_EPOCHS if args.epochs is None else args.epochs
        clf = classify.train_linear_svm(
            data, c_param=args.c_param, epochs=epochs, seed=args.seed
        )
    predictions = [classify.predict(clf, vec.probs) for vec in test_vecs]
    acc = classify.accuracy(predictions, test_labels)
    print(f"classifier: {args.classifier}")
    print(f"test_documents: {len(test_labels)}")
    print(f"accuracy_pct: {acc!r}")
    print(f"accuracy_display: {harness.display_percent(acc)}%")
    matrix = classify.confusion_matrix(predictions, test_labels, clf.label_set)
    print("confusion (rows=gold, cols=predicted):")
    print("  " + " ".join(clf.label_set))
    for i, label in enumerate(clf.label_set):
        print(f"  {label} " + " ".join(str(v) for v in matrix[i]))
    if args.predictions_out:
        lines = ["doc_id,gold,predicted"]
        lines += [
            f"{doc_id},{gold},{pred}"
            for doc_id, gold, pred in zip(test_ids, test_labels, predictions)
        ]
        Path(args.predictions_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if args.arff_out:
        classify.write_arff(
            args.arff_out,
            [vec.probs for vec in train_vecs],
            train_labels,
            clf.label_set,
        )
        log.info("wrote ARFF export to %s", args.arff_out)
    return 0


def cmd_cell(args):
    train = _load_preprocessed(args.train_corpus, args.stoplist)
    test = _load_preprocessed(args.test_corpus, args.stoplist)
    if args.train_size is not None:
        n_cat = len(train.categories)
        if args.train_size % n_cat != 0:
            raise ValueError(
                f"train size {args.train_size} not divisible by {n_cat} categories"
            )
        subset_seed = harness.derive_seed(args.base_seed, "subset", args.train_size)
        train, _ = split_train_test(train, args.train_size // n_cat, 0, subset_seed)
        size = args.train_size
    else:
        size = len(train)
    seed = harness.cell_seed(args.base_seed, size, args.topics, args.iterations,
                             args.repeat)
    started = time.perf_counter()
    acc = harness.run_cell(
        train, test, args.topics, args.iterations, args.classifier, seed,
        min_count=args.min_count, restarts=args.restarts,
    )
    log.info("cell completed in %.3f s", time.perf_counter() - started)
    # Timing stays off stdout so identical runs emit byte-identical rows.
    print("train_size,topics,iterations,repeat,classifier,accuracy_pct")
    print(f"{size},{args.topics},{args.iterations},{args.repeat},"
          f"{args.classifier},{acc!r}")
    return 0


def _merge_grid_options(args):
    config_values = {}
    if args.config:
        config_values = harness.load_config_file(args.config)
    known = {
        "train-sizes": ("train_sizes", _int_list),
        "topics": ("topics", _int_list),
        "iterations": ("iterations", _int_list),
        "repeats": ("repeats", int),
        "classifiers": ("classifiers", _str_list),
        "base-seed": ("base_seed", int),
        "jobs": ("jobs", int),
        "restarts": ("restarts", int),
        "train-corpus": ("train_corpus", str),
        "test-corpus": ("test_corpus", str),
        "stoplist": ("stoplist", str),
        "out": ("out", str),
    }
    for key, value in config_values.items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        attr, convert = known[key]
        if getattr(args, attr) is None:  # flags take precedence over the file
            setattr(args, attr, convert(value))
    defaults = harness.ExperimentConfig()
    if args.train_sizes is None:
        args.train_sizes = list(defaults.train_sizes)
    if args.topics is None:
        args.topics = list(defaults.topic_counts)
    if args.iterations is None:
        args.iterations = list(defaults.iteration_counts)
    if args.repeats is None:
        args.repeats = defaults.repeats
    if args.classifiers is None:
        args.classifiers = list(defaults.classifiers)
    if args.base_seed is None:
        args.base_seed = defaults.base_seed
    if args.jobs is None:
        args.jobs = 1
    if args.restarts is None:
        args.restarts = harness.DEFAULT_RESTARTS
    for name in ("train_corpus", "test_corpus", "out"):
        if getattr(args, name) is None:
            raise ValueError(f"missing required option --{name.replace('_', '-')}")


def cmd_grid(args):
    _merge_grid_options(args)
    config = harness.ExperimentConfig(
        topic_counts=tuple(args.topics),
        iteration_counts=tuple(args.iterations),
        train_sizes=tuple(args.train_sizes),
        repeats=args.repeats,
        classifiers=tuple(args.classifiers),
        base_seed=args.base_seed,
    )
    train_pool = _load_preprocessed(args.train_corpus, args.stoplist)
    test = _load_preprocessed(args.test_corpus, args.stoplist)
    log.info("running %d grid cells with jobs=%d", config.n_cells(), args.jobs)
    started = time.perf_counter()
    report = harness.run_grid(config, train_pool, test, jobs=args.jobs,
                              restarts=args.restarts)
    elapsed = time.perf_counter() - started
    harness.emit_report(report, args.out)
    print(f"cells: {len(report.cells)}")
    print(f"seconds: {elapsed:.3f}")
    print(f"report: {args.out}")
    return 0


def cmd_summarize(args):
    if args.reference_tables:
        cells = harness.load_reference_tables()
    else:
        if not args.report:
            raise ValueError("provide --report FILE or --reference-tables")
        cells = harness.parse_report(args.report).cells
    axes = args.axis or list(harness.SUMMARY_AXES)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for axis in axes:
        pairs = harness.summarize(cells, axis)
        print(f"axis: {axis}")
        for key, mean in pairs:
            print(f"  {key}: {harness.display_percent(mean)}%")
        if out_dir:
            csv_path = out_dir / f"summary_{axis}.csv"
            lines = [f"{axis},mean_accuracy_pct,display_pct"]
            lines += [
                f"{key},{mean!r},{harness.display_percent(mean)}"
                for key, mean in pairs
            ]
            csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            if not args.no_figures:
                from . import plots

                figure_path = out_dir / f"summary_{axis}.png"
                plots.render_axis_summary(axis, pairs, figure_path)
                log.info("wrote %s and %s", csv_path, figure_path)
            else:
                log.info("wrote %s", csv_path)
    return 0


def cmd_gen_synth(args):
    train, test = synth.make_synthetic_corpus(
        n_categories=args.categories,
        words_per_category=args.words_per_category,
        shared_fraction=args.shared_fraction,
        train_per_category=args.train_per_category,
        test_per_category=args.test_per_category,
        doc_length=args.doc_length,
        seed=args.seed,
        category_names=args.category_names,
        sources=args.sources,
        source_weights=args.source_weights,
    )
    out = Path(args.out)
    synth.write_corpus_tree(train, out / "train")
    synth.write_corpus_tree(test, out / "test")
    print(f"train_documents: {len(train)}")
    print(f"test_documents: {len(test)}")
    print(f"categories: {','.join(sorted(train.categories))}")
    print(f"output: {out}")
    if args.source_balance:
        print("source_balance (corpus,category,source,count):")
        for name, corpus in (("train", train), ("test", test)):
            for category, source, count in synth.source_balance(corpus):
                print(f"  {name},{category},{source},{count}")
    return 0


def build_parser():
    parser = _Parser(prog="plsakit", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("preprocess", cmd_preprocess,
            "tokenize a corpus directory and report vocabulary statistics")
    p.add_argument("--corpus", required=True, help="corpus root directory")
    p.add_argument("--stoplist", default=None,
                   help="stoplist file (default: bundled Indonesian list)")
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--vocab-out", default=None, help="write vocabulary words here")

    p = add("train", cmd_train, "train a topic model and save it")
    p.add_argument("--corpus", required=True)
    p.add_argument("--stoplist", default=None)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--topics", type=int, required=True)
    p.add_argument("--iterations", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None,
                   help="optional relative log-likelihood early-stop tolerance")
    p.add_argument("--out", required=True, help="model output path")
    p.add_argument("--features-out", default=None,
                   help="also write training document topic features as CSV")

    p = add("fold-in", cmd_fold_in, "project a corpus through a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--stoplist", default=None)
    p.add_argument("--by-types", action="store_true",
                   help="average over distinct tokens instead of occurrences")
    p.add_argument("--out", required=True, help="features CSV output path")

    p = add("classify", cmd_classify,
            "train a classifier on feature CSVs and score a test CSV")
    p.add_argument("--train-features", required=True)
    p.add_argument("--test-features", required=True)
    p.add_argument("--classifier", choices=("svm", "logistic"), required=True)
    p.add_argument("--lr", type=float, default=classify.DEFAULT_LOGISTIC_LR)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--l2", type=float, default=classify.DEFAULT_LOGISTIC_L2)
    p.add_argument("--c-param", type=float, default=classify.DEFAULT_SVM_C)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--predictions-out", default=None)
    p.add_argument("--arff-out", default=None,
                   help="export the training features as an ARFF file")

    p = add("cell", cmd_cell, "run one experiment cell end to end")
    p.add_argument("--train-corpus", required=True)
    p.add_argument("--test-corpus", required=True)
    p.add_argument("--stoplist", default=None)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--topics", type=int, required=True)
    p.add_argument("--iterations", type=int, required=True)
    p.add_argument("--classifier", choices=("svm", "logistic"), required=True)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--restarts", type=int, default=harness.DEFAULT_RESTARTS,
                   help="EM restarts per cell; best training likelihood wins")
    p.add_argument("--train-size", type=int, default=None,
                   help="subset the training corpus to this many documents "
                        "using the grid's stratified selection")

    p = add("grid", cmd_grid, "run the full experiment grid and write a report CSV")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--train-corpus", default=None)
    p.add_argument("--test-corpus", default=None)
    p.add_argument("--stoplist", default=None)
    p.add_argument("--train-sizes", type=_int_list, default=None)
    p.add_argument("--topics", type=_int_list, default=None)
    p.add_argument("--iterations", type=_int_list, default=None)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--classifiers", type=_str_list, default=None)
    p.add_argument("--base-seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None,
                   help="EM restarts per cell; best training likelihood wins")
    p.add_argument("--out", default=None, help="report CSV output path")

    p = add("summarize", cmd_summarize,
            "aggregate a report by axis; write CSVs and bar charts")
    p.add_argument("--report", default=None, help="report CSV to summarize")
    p.add_argument("--reference-tables", action="store_true",
                   help="summarize the bundled published tables instead")
    p.add_argument("--axis", action="append", choices=harness.SUMMARY_AXES,
                   help="axis to aggregate (repeatable; default: all)")
    p.add_argument("--out-dir", default=None,
                   help="write summary_<axis>.csv and summary_<axis>.png here")
    p.add_argument("--no-figures", action="store_true")

    p = add("gen-synth", cmd_gen_synth,
            "generate a synthetic labeled corpus directory")
    p.add_argument("--out", required=True)
    p.add_argument("--categories", type=int, default=4)
    p.add_argument("--category-names", type=_str_list, default=None)
    p.add_argument("--words-per-category", type=int, default=15)
    p.add_argument("--shared-fraction", type=float, default=0.0)
    p.add_argument("--train-per-category", type=int, default=75)
    p.add_argument("--test-per-category", type=int, default=25)
    p.add_argument("--doc-length", type=_doc_length, default=(30, 60),
                   metavar="LO:HI")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sources", type=_str_list, default=list(synth.DEFAULT_SOURCES))
    p.add_argument("--source-weights", type=_float_list, default=None)
    p.add_argument("--source-balance", action="store_true",
                   help="print per-(category, source) document counts")
    return parser


def main(argv=None):
    logging.basicConfig(
        level=logging.INFO, stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"plsakit: error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"plsakit: data error: {exc}", file=sys.stderr)
        return 2
    except (OSError, UnicodeDecodeError) as exc:
        print(f"plsakit: io error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"plsakit: numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
