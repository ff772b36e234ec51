"""Linear classifiers over topic feature vectors, built from scratch.

Two trainers share the LinearClassifier container: multinomial logistic
regression fit by full-batch gradient descent, and a one-vs-rest linear
SVM fit by per-sample hinge subgradient steps. Both are deterministic
for fixed inputs and seed. Feature vectors are used as-is; they are
already probability simplices.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_LOGISTIC_LR = 0.1
DEFAULT_LOGISTIC_EPOCHS = 500
DEFAULT_LOGISTIC_L2 = 1e-4
DEFAULT_SVM_C = 1.0
DEFAULT_SVM_EPOCHS = 500


@dataclass(frozen=True)
class LabeledFeatures:
    """Feature rows paired with category labels, plus the ordered label set."""

    rows: list
    label_set: list

    @classmethod
    def from_pairs(cls, pairs, label_set=None):
        """Build from (vector, label) pairs; labels ordered by first appearance."""
        rows = [(np.asarray(vec, dtype=np.float64), label) for vec, label in pairs]
        if label_set is None:
            label_set = []
            for _, label in rows:
                if label not in label_set:
                    label_set.append(label)
        else:
            label_set = list(label_set)
            known = set(label_set)
            for _, label in rows:
                if label not in known:
                    raise ValueError(f"row label {label!r} not in label set")
        dims = {len(vec) for vec, _ in rows}
        if len(dims) > 1:
            raise ValueError(f"inconsistent feature dimensions: {sorted(dims)}")
        return cls(rows=rows, label_set=label_set)

    def matrices(self):
        """Return (X, y) with X shape (N, K) and y integer label indices."""
        X = np.stack([vec for vec, _ in self.rows])
        lookup = {label: i for i, label in enumerate(self.label_set)}
        y = np.array([lookup[label] for _, label in self.rows], dtype=np.int64)
        return X, y


@dataclass(frozen=True)
class LinearClassifier:
    """One weight row per class; the last column is the bias term."""

    kind: str
    weights: np.ndarray
    label_set: list

    @property
    def n_features(self):
        return self.weights.shape[1] - 1


def _validate_training_data(data):
    X, y = data.matrices()
    if len(data.label_set) < 2:
        raise ValueError("training data must contain at least 2 classes")
    if not np.all(np.isfinite(X)):
        raise ValueError("training features contain non-finite values")
    for c in range(len(data.label_set)):
        if not np.any(y == c):
            raise ValueError(f"class {data.label_set[c]!r} has no training rows")
    return X, y


def _softmax(scores):
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def logistic_loss_and_grad(weights, X, y, l2):
    """Mean cross-entropy plus l2*||w||^2/2 (bias column unpenalized).

    Returns (loss, gradient) with the gradient matching the weights
    layout (C, K+1). This is the exact objective train_logistic descends.
    """
    n = X.shape[0]
    x_aug = np.hstack([X, np.ones((n, 1))])
    scores = x_aug @ weights.T
    probs = _softmax(scores)
    picked = probs[np.arange(n), y]
    loss = -float(np.log(np.maximum(picked, 1e-300)).sum()) / n
    loss += 0.5 * l2 * float((weights[:, :-1] ** 2).sum())
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), y] = 1.0
    grad = (probs - onehot).T @ x_aug / n
    grad[:, :-1] += l2 * weights[:, :-1]
    return loss, grad


def train_logistic(data, learning_rate=DEFAULT_LOGISTIC_LR,
                   epochs=DEFAULT_LOGISTIC_EPOCHS, l2=DEFAULT_LOGISTIC_L2, seed=0):
    """Multinomial softmax regression by full-batch gradient descent.

    Weights start at zero, so the result is deterministic and the seed
    argument (kept for interface symmetry with the SVM trainer) is unused.
    """
    X, y = _validate_training_data(data)
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    n_classes = len(data.label_set)
    weights = np.zeros((n_classes, X.shape[1] + 1))
    for _ in range(epochs):
        _, grad = logistic_loss_and_grad(weights, X, y, l2)
        weights = weights - learning_rate * grad
    return LinearClassifier(kind="logistic", weights=weights, label_set=data.label_set)


def svm_loss_and_grad(weights, X, y, c_param):
    """Summed one-vs-rest hinge objective and its (sub)gradient.

    Per class c: 0.5*||w_c||^2 + c_param * mean_i max(0, 1 - y_ic * s_ic)
    with y_ic = +1 for rows of class c and -1 otherwise. The gradient is
    exact wherever no margin sits on the hinge kink.
    """
    n = X.shape[0]
    n_classes = weights.shape[0]
    x_aug = np.hstack([X, np.ones((n, 1))])
    scores = x_aug @ weights.T  # (N, C)
    signs = np.where(np.arange(n_classes)[None, :] == y[:, None], 1.0, -1.0)
    margins = signs * scores
    violating = margins < 1.0
    loss = 0.5 * float((weights[:, :-1] ** 2).sum())
    loss += c_param * float(np.maximum(0.0, 1.0 - margins).sum()) / n
    grad = np.zeros_like(weights)
    grad[:, :-1] = weights[:, :-1]
    contrib = np.where(violating, -signs, 0.0)  # (N, C)
    grad += c_param * contrib.T @ x_aug / n
    return loss, grad


def train_linear_svm(data, c_param=DEFAULT_SVM_C, epochs=DEFAULT_SVM_EPOCHS, seed=0):
    """One-vs-rest linear SVM by per-sample subgradient descent.

    Sample order is reshuffled every epoch from the given seed; the step
    size decays as 1/(2 + t) over global steps t. All classes update
    together on each visited sample. With c_param = 0 only the weight
    shrinkage remains and the zero start never moves.
    """
    X, y = _validate_training_data(data)
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    n, k = X.shape
    n_classes = len(data.label_set)
    weights = np.zeros((n_classes, k + 1))
    rng = np.random.default_rng(seed)
    signs_full = np.where(np.arange(n_classes)[None, :] == y[:, None], 1.0, -1.0)
    x_all = np.hstack([X, np.ones((n, 1))])
    step = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for i in order:
            eta = 1.0 / (2.0 + step)
            step += 1
            x_aug = x_all[i]
            margins = signs_full[i] * (weights @ x_aug)
            # Regularizer shrink applies to every class's feature weights.
            weights[:, :-1] *= 1.0 - eta
            hit = margins < 1.0
            if hit.any():
                weights[hit] += eta * c_param * signs_full[i][hit][:, None] * x_aug[None, :]
    return LinearClassifier(kind="svm", weights=weights, label_set=data.label_set)


def decision_scores(model, x):
    """Per-class linear scores w.x + b for one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ValueError(
            f"feature vector has shape {x.shape}, expected ({model.n_features},)"
        )
    return model.weights[:, :-1] @ x + model.weights[:, -1]


def predict_proba(model, x):
    """Softmax of the class scores; calibrated only for the logistic kind."""
    scores = decision_scores(model, x)
    shifted = scores - scores.max()
    e = np.exp(shifted)
    return e / e.sum()


def predict(model, x):
    """Argmax class label; ties break toward the lowest label index."""
    scores = decision_scores(model, x)
    return model.label_set[int(np.argmax(scores))]


def accuracy(predictions, gold):
    """Percentage of matching positions, kept at full float precision."""
    if len(predictions) != len(gold):
        raise ValueError(
            f"prediction/gold length mismatch: {len(predictions)} vs {len(gold)}"
        )
    if not predictions:
        raise ValueError("cannot compute accuracy of empty lists")
    matches = sum(1 for p, g in zip(predictions, gold) if p == g)
    return 100.0 * matches / len(predictions)


def confusion_matrix(predictions, gold, label_set):
    """Counts with gold labels on rows and predictions on columns."""
    if len(predictions) != len(gold):
        raise ValueError(
            f"prediction/gold length mismatch: {len(predictions)} vs {len(gold)}"
        )
    lookup = {label: i for i, label in enumerate(label_set)}
    matrix = np.zeros((len(label_set), len(label_set)), dtype=np.int64)
    for p, g in zip(predictions, gold):
        if g not in lookup:
            raise ValueError(f"unknown gold label {g!r}")
        if p not in lookup:
            raise ValueError(f"unknown predicted label {p!r}")
        matrix[lookup[g], lookup[p]] += 1
    return matrix


def _arff_quote(value):
    if value and all(ch.isalnum() or ch in "_-." for ch in value):
        return value
    return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"


def write_arff(path, vectors, labels, label_set, relation="plsa_topic_features"):
    """Emit features as an ARFF file for cross-checking with external tools."""
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels lengths differ")
    k = len(vectors[0]) if len(vectors) else 0
    lines = [f"@relation {relation}", ""]
    for z in range(k):
        lines.append(f"@attribute p_z{z + 1} numeric")
    lines.append(
        "@attribute category {" + ",".join(_arff_quote(c) for c in label_set) + "}"
    )
    lines.append("")
    lines.append("@data")
    for vec, label in zip(vectors, labels):
        lines.append(
            ",".join(repr(float(v)) for v in vec) + "," + _arff_quote(label)
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
