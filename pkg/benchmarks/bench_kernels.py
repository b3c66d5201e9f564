"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from btcurator.kernels import py_kernels

try:
    from btcurator.kernels import _ckernels
except ImportError:
    _ckernels = None


def make_tfidf_problem(rng, n_queries, n_docs, n_terms, terms_per_doc=12,
                       terms_per_query=8):
    q_off = [0]
    q_terms, q_weights, q_norms = [], [], []
    for _ in range(n_queries):
        k = int(rng.integers(1, terms_per_query + 1))
        terms = rng.choice(n_terms, size=k, replace=False)
        weights = rng.random(k) + 0.1
        q_terms.extend(sorted(terms))
        q_weights.extend(weights)
        q_norms.append(float(np.sqrt((weights ** 2).sum())))
        q_off.append(len(q_terms))
    postings = {t: [] for t in range(n_terms)}
    for d in range(n_docs):
        k = int(rng.integers(1, terms_per_doc + 1))
        for t in rng.choice(n_terms, size=k, replace=False):
            postings[t].append((d, float(rng.random() + 0.1)))
    term_off = [0]
    post_docs, post_weights = [], []
    doc_sq = np.zeros(n_docs)
    for t in range(n_terms):
        for d, w in postings[t]:
            post_docs.append(d)
            post_weights.append(w)
            doc_sq[d] += w * w
        term_off.append(len(post_docs))
    doc_sq[doc_sq == 0] = 1.0
    return (
        np.array(q_off, dtype=np.int64),
        np.array(q_terms, dtype=np.int32),
        np.array(q_weights, dtype=np.float64),
        np.array(q_norms, dtype=np.float64),
        np.array(term_off, dtype=np.int64),
        np.array(post_docs, dtype=np.int32),
        np.array(post_weights, dtype=np.float64),
        np.sqrt(doc_sq),
    )


def make_model1_problem(rng, n_sent, vocab, max_len=12):
    sents = []
    for _ in range(n_sent):
        xs = rng.integers(0, vocab, size=int(rng.integers(2, max_len))).tolist()
        ys = rng.integers(0, vocab, size=int(rng.integers(2, max_len))).tolist()
        sents.append((xs, ys))
    pair_ids = {}
    for xs, ys in sents:
        for x in xs:
            for y in ys:
                pair_ids.setdefault((x, y), len(pair_ids))
    pair_src = np.array([x for (x, _y) in pair_ids], dtype=np.int32)
    n = len(sents)
    x_off = np.zeros(n + 1, dtype=np.int64)
    y_off = np.zeros(n + 1, dtype=np.int64)
    k_off = np.zeros(n + 1, dtype=np.int64)
    k_flat = []
    for s, (xs, ys) in enumerate(sents):
        x_off[s + 1] = x_off[s] + len(xs)
        y_off[s + 1] = y_off[s] + len(ys)
        k_off[s + 1] = k_off[s] + len(xs) * len(ys)
        for y in ys:
            for x in xs:
                k_flat.append(pair_ids[(x, y)])
    t = rng.random(len(pair_ids)) + 0.05
    return t, k_off, x_off, y_off, np.array(k_flat, dtype=np.int32), pair_src, vocab


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_tfidf(repeats):
    rng = np.random.default_rng(0)
    print("tfidf_max_cosines")
    print(f"{'queries x docs':>18} {'python':>10} {'cython':>10} {'speedup':>8}")
    for n_queries, n_docs in ((500, 200), (2000, 500), (5000, 1000)):
        prob = make_tfidf_problem(rng, n_queries, n_docs, n_terms=400)
        out = np.zeros(n_queries)

        t_py = time_call(lambda: py_kernels.tfidf_max_cosines(*prob, out), repeats)
        if _ckernels is not None:
            t_c = time_call(lambda: _ckernels.tfidf_max_cosines(*prob, out), repeats)
            print(f"{n_queries:>9} x {n_docs:<6} {t_py:>9.4f}s {t_c:>9.4f}s "
                  f"{t_py / t_c:>7.1f}x")
        else:
            print(f"{n_queries:>9} x {n_docs:<6} {t_py:>9.4f}s {'n/a':>10} {'':>8}")


def bench_model1(repeats):
    rng = np.random.default_rng(1)
    print("\nmodel1_estep")
    print(f"{'sentences':>18} {'python':>10} {'cython':>10} {'speedup':>8}")
    for n_sent in (200, 1000, 4000):
        t, k_off, x_off, y_off, k_flat, pair_src, vocab = make_model1_problem(
            rng, n_sent, vocab=300
        )
        counts = np.zeros(len(t))
        rows = np.zeros(vocab)

        def run_py():
            counts[:] = 0
            rows[:] = 0
            py_kernels.model1_estep(t, k_off, x_off, y_off, k_flat, pair_src,
                                    counts, rows)

        t_py = time_call(run_py, repeats)
        if _ckernels is not None:
            def run_c():
                counts[:] = 0
                rows[:] = 0
                _ckernels.model1_estep(t, k_off, x_off, y_off, k_flat, pair_src,
                                       counts, rows)

            t_c = time_call(run_c, repeats)
            print(f"{n_sent:>18} {t_py:>9.4f}s {t_c:>9.4f}s {t_py / t_c:>7.1f}x")
        else:
            print(f"{n_sent:>18} {t_py:>9.4f}s {'n/a':>10} {'':>8}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled kernels not available; timing the fallback only\n")
    bench_tfidf(args.repeats)
    bench_model1(args.repeats)


if __name__ == "__main__":
    main()
