"""Pure-Python kernels: reference implementations of the hot loops.

The compiled extension (_ckernels) mirrors these loop-for-loop, including
summation order, so both backends produce identical floats. Keep the two in
sync when touching either.
"""

import math

BACKEND = "python"


def tfidf_max_cosines(
    q_off, q_terms, q_weights, q_norms,
    term_off, post_docs, post_weights, doc_norms,
    out,
):
    """Max cosine similarity of each sparse query against an inverted index.

    Queries are CSR-packed (q_off/q_terms/q_weights, precomputed L2 norms in
    q_norms). The index is CSR-packed by term: term t's postings are
    post_docs/post_weights[term_off[t]:term_off[t+1]]. Results go to out,
    one max-cosine per query; a query sharing no term with any indexed
    document scores 0.
    """
    n_docs = len(doc_norms)
    acc = [0.0] * n_docs
    touched = []
    for q in range(len(q_off) - 1):
        for p in range(q_off[q], q_off[q + 1]):
            t = q_terms[p]
            w = q_weights[p]
            for e in range(term_off[t], term_off[t + 1]):
                d = post_docs[e]
                if acc[d] == 0.0:
                    touched.append(d)
                acc[d] += w * post_weights[e]
        best = 0.0
        qn = q_norms[q]
        for d in touched:
            if qn > 0.0 and doc_norms[d] > 0.0:
                c = acc[d] / (qn * doc_norms[d])
                if c > best:
                    best = c
            acc[d] = 0.0
        touched.clear()
        out[q] = best
    return out


def model1_estep(t, k_off, x_off, y_off, k_flat, pair_src, counts, row_total):
    """One IBM Model 1 expectation pass over a packed pair corpus.

    t holds the current translation probability of every co-occurring
    (source word, target word) pair; k_flat maps, sentence by sentence and
    target-position-major, each (target j, source i) slot to its pair index.
    Accumulates fractional counts into counts/row_total (caller zeroes them)
    and returns the conditional log-likelihood of the corpus under t.
    """
    loglik = 0.0
    n_sent = len(x_off) - 1
    for s in range(n_sent):
        lx = x_off[s + 1] - x_off[s]
        ly = y_off[s + 1] - y_off[s]
        base = k_off[s]
        for j in range(ly):
            row = base + j * lx
            denom = 0.0
            for i in range(lx):
                denom += t[k_flat[row + i]]
            loglik += math.log(denom) - math.log(lx)
            for i in range(lx):
                k = k_flat[row + i]
                c = t[k] / denom
                counts[k] += c
                row_total[pair_src[k]] += c
    return loglik
