# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of py_kernels; keep loop and summation order identical."""

import numpy as np

from libc.math cimport log

BACKEND = "cython"


def tfidf_max_cosines(
    long[:] q_off, int[:] q_terms, double[:] q_weights, double[:] q_norms,
    long[:] term_off, int[:] post_docs, double[:] post_weights, double[:] doc_norms,
    double[:] out,
):
    cdef Py_ssize_t n_docs = doc_norms.shape[0]
    cdef double[:] acc = np.zeros(n_docs, dtype=np.float64)
    cdef int[:] touched = np.empty(n_docs, dtype=np.int32)
    cdef Py_ssize_t n_touched = 0
    cdef Py_ssize_t q, p, e, i
    cdef int t, d
    cdef double w, best, qn, c
    for q in range(q_off.shape[0] - 1):
        n_touched = 0
        for p in range(q_off[q], q_off[q + 1]):
            t = q_terms[p]
            w = q_weights[p]
            for e in range(term_off[t], term_off[t + 1]):
                d = post_docs[e]
                if acc[d] == 0.0:
                    touched[n_touched] = d
                    n_touched += 1
                acc[d] += w * post_weights[e]
        best = 0.0
        qn = q_norms[q]
        for i in range(n_touched):
            d = touched[i]
            if qn > 0.0 and doc_norms[d] > 0.0:
                c = acc[d] / (qn * doc_norms[d])
                if c > best:
                    best = c
            acc[d] = 0.0
        out[q] = best
    return np.asarray(out)


def model1_estep(
    double[:] t, long[:] k_off, long[:] x_off, long[:] y_off,
    int[:] k_flat, int[:] pair_src, double[:] counts, double[:] row_total,
):
    cdef double loglik = 0.0
    cdef Py_ssize_t n_sent = x_off.shape[0] - 1
    cdef Py_ssize_t s, j, i, row, base
    cdef long lx, ly
    cdef int k
    cdef double denom, c
    for s in range(n_sent):
        lx = x_off[s + 1] - x_off[s]
        ly = y_off[s + 1] - y_off[s]
        base = k_off[s]
        for j in range(ly):
            row = base + j * lx
            denom = 0.0
            for i in range(lx):
                denom += t[k_flat[row + i]]
            loglik += log(denom) - log(<double> lx)
            for i in range(lx):
                k = k_flat[row + i]
                c = t[k] / denom
                counts[k] += c
                row_total[pair_src[k]] += c
    return loglik
