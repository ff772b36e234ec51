"""Topic-model text classification toolkit.

Trains an aspect model on a term-document matrix with EM, folds unseen
documents into topic space, and feeds the resulting topic feature
vectors to small from-scratch linear classifiers. A grid harness runs
the full evaluation protocol and summarizes accuracy by axis.
"""

from .classify import (
    LabeledFeatures,
    LinearClassifier,
    accuracy,
    confusion_matrix,
    predict,
    predict_proba,
    train_linear_svm,
    train_logistic,
    write_arff,
)
from .corpus import (
    Corpus,
    CountMatrix,
    Document,
    Vocabulary,
    build_count_matrix,
    build_vocabulary,
    load_corpus,
    load_stoplist,
    remove_stopwords,
    split_train_test,
    tokenize,
)
from .errors import DataError, NumericError, PlsakitError
from .foldin import (
    TopicFeatureVector,
    fold_in,
    fold_in_corpus,
    read_features_csv,
    word_topic_posterior,
    write_features_csv,
)
from .harness import (
    CellResult,
    ExperimentConfig,
    ExperimentReport,
    cell_seed,
    display_percent,
    emit_report,
    load_reference_tables,
    parse_report,
    run_cell,
    run_grid,
    summarize,
)
from .plsa import (
    PlsaModel,
    TrainingTrace,
    doc_topic_features,
    e_step_posterior,
    init_model,
    joint_probability,
    load_model,
    log_likelihood,
    m_step,
    parameter_count,
    save_model,
    train,
)
from .synth import make_synthetic_corpus, source_balance, write_corpus_tree

__version__ = "0.1.0"

__all__ = [
    "PlsakitError",
    "DataError",
    "NumericError",
    "Document",
    "Corpus",
    "Vocabulary",
    "CountMatrix",
    "tokenize",
    "remove_stopwords",
    "load_stoplist",
    "load_corpus",
    "build_vocabulary",
    "build_count_matrix",
    "split_train_test",
    "PlsaModel",
    "TrainingTrace",
    "init_model",
    "e_step_posterior",
    "m_step",
    "log_likelihood",
    "joint_probability",
    "train",
    "doc_topic_features",
    "parameter_count",
    "save_model",
    "load_model",
    "TopicFeatureVector",
    "word_topic_posterior",
    "fold_in",
    "fold_in_corpus",
    "write_features_csv",
    "read_features_csv",
    "LabeledFeatures",
    "LinearClassifier",
    "train_logistic",
    "train_linear_svm",
    "predict",
    "predict_proba",
    "accuracy",
    "confusion_matrix",
    "write_arff",
    "ExperimentConfig",
    "CellResult",
    "ExperimentReport",
    "cell_seed",
    "display_percent",
    "run_cell",
    "run_grid",
    "summarize",
    "emit_report",
    "parse_report",
    "load_reference_tables",
    "make_synthetic_corpus",
    "write_corpus_tree",
    "source_balance",
    "__version__",
]
