"""Brute-force dense reference implementations used as test oracles.

Everything here is written with plain Python loops and floats, no
vectorization, so it cannot share bugs with the optimized library code.
"""


def e_step_reference(p_z, p_d_z, p_w_z, d, w):
    """Posterior over topics for one (d, w) cell, by direct evaluation."""
    k = len(p_z)
    numer = [p_z[z] * p_d_z[z][d] * p_w_z[z][w] for z in range(k)]
    denom = sum(numer)
    if denom < 1e-300:
        return [1.0 / k] * k
    return [v / denom for v in numer]


def m_step_reference(p_z, p_d_z, p_w_z, dense_counts):
    """One re-estimation sweep over a dense count table.

    dense_counts is a D x W list of lists; zero cells contribute nothing
    but are still looped over, keeping the computation maximally literal.
    Returns (p_z, p_d_z, p_w_z) as nested lists.
    """
    n_docs = len(dense_counts)
    n_words = len(dense_counts[0])
    k = len(p_z)
    post = [
        [e_step_reference(p_z, p_d_z, p_w_z, d, w) for w in range(n_words)]
        for d in range(n_docs)
    ]
    w_acc = [[0.0] * n_words for _ in range(k)]
    d_acc = [[0.0] * n_docs for _ in range(k)]
    z_acc = [0.0] * k
    for d in range(n_docs):
        for w in range(n_words):
            n_dw = dense_counts[d][w]
            for z in range(k):
                mass = n_dw * post[d][w][z]
                w_acc[z][w] += mass
                d_acc[z][d] += mass
                z_acc[z] += mass
    total = sum(z_acc)
    new_p_z = [z_acc[z] / total for z in range(k)]
    new_p_w_z = [
        [w_acc[z][w] / sum(w_acc[z]) for w in range(n_words)] for z in range(k)
    ]
    new_p_d_z = [
        [d_acc[z][d] / sum(d_acc[z]) for d in range(n_docs)] for z in range(k)
    ]
    return new_p_z, new_p_d_z, new_p_w_z


def log_likelihood_reference(p_z, p_d_z, p_w_z, dense_counts):
    """Sum of n(d,w) * log P(d,w) by double loop over the dense table."""
    import math

    n_docs = len(dense_counts)
    n_words = len(dense_counts[0])
    k = len(p_z)
    total = 0.0
    for d in range(n_docs):
        for w in range(n_words):
            n_dw = dense_counts[d][w]
            if n_dw == 0:
                continue
            joint = sum(p_z[z] * p_d_z[z][d] * p_w_z[z][w] for z in range(k))
            total += n_dw * math.log(max(joint, 1e-300))
    return total


def dense_from_matrix(counts):
    """Expand a sparse CountMatrix into a dense list-of-lists table."""
    table = [[0] * counts.n_words for _ in range(counts.n_docs)]
    for (d, w), c in counts.entries.items():
        table[d][w] = c
    return table


def model_tables(model):
    """Pull a model's tables out as nested Python lists."""
    return (
        [float(v) for v in model.p_z],
        [[float(v) for v in row] for row in model.p_d_given_z],
        [[float(v) for v in row] for row in model.p_w_given_z],
    )
