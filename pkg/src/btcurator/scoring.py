"""Representativeness and simplicity metrics plus min-max normalization.

Sign convention: every LM-based score is an average log-probability
(negative cross-entropy), so "higher" uniformly means more representative /
simpler, and the Moore-Lewis difference selects in-domain-specific sentences
when maximized.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .corpus import Sentence
from .errors import DataError
from .metrics import sentence_bleu

logger = logging.getLogger(__name__)


def _token_seq(sent):
    return list(getattr(sent, "tokens", sent))


class TfIdfIndex:
    """Inverted index of the in-domain reference set, with document
    frequencies taken from the monolingual corpus.

    tf is the raw within-sentence count; idf = ln((1+N)/(1+df)) + 1 where N
    and df are computed over the monolingual corpus (documents = sentences).
    Scoring visits only reference sentences sharing at least one term with
    the query.
    """

    def __init__(self, monolingual_corpus, in_domain_sentences):
        self.n_docs = len(monolingual_corpus)
        if self.n_docs == 0:
            raise DataError("cannot build TF-IDF index from an empty corpus")
        self.df: Counter = Counter()
        for sent in monolingual_corpus:
            self.df.update(set(_token_seq(sent)))

        in_domain = [_token_seq(s) for s in in_domain_sentences]
        if not in_domain:
            raise DataError("empty in-domain reference set")
        self.n_in_domain = len(in_domain)

        self._term_ids: dict[str, int] = {}
        postings: list[list[tuple[int, float]]] = []
        doc_norms = np.zeros(len(in_domain))
        for d, tokens in enumerate(in_domain):
            sq = 0.0
            for term, tf in sorted(Counter(tokens).items()):
                w = tf * self.idf(term)
                sq += w * w
                tid = self._term_ids.setdefault(term, len(self._term_ids))
                if tid == len(postings):
                    postings.append([])
                postings[tid].append((d, w))
            doc_norms[d] = math.sqrt(sq)
        self.doc_norms = doc_norms
        self.term_off = np.zeros(len(postings) + 1, dtype=np.int64)
        for tid, plist in enumerate(postings):
            self.term_off[tid + 1] = self.term_off[tid] + len(plist)
        self.post_docs = np.empty(self.term_off[-1], dtype=np.int32)
        self.post_weights = np.empty(self.term_off[-1], dtype=np.float64)
        pos = 0
        for plist in postings:
            for d, w in plist:
                self.post_docs[pos] = d
                self.post_weights[pos] = w
                pos += 1

    def idf(self, term: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.df[term])) + 1.0

    def _pack_queries(self, sentences):
        q_off = [0]
        q_terms: list[int] = []
        q_weights: list[float] = []
        q_norms: list[float] = []
        for sent in sentences:
            sq = 0.0
            for term, tf in sorted(Counter(_token_seq(sent)).items()):
                w = tf * self.idf(term)
                sq += w * w
                tid = self._term_ids.get(term)
                if tid is not None:
                    q_terms.append(tid)
                    q_weights.append(w)
            q_norms.append(math.sqrt(sq))
            q_off.append(len(q_terms))
        return (
            np.array(q_off, dtype=np.int64),
            np.array(q_terms, dtype=np.int32),
            np.array(q_weights, dtype=np.float64),
            np.array(q_norms, dtype=np.float64),
        )

    def max_cosines(self, sentences) -> np.ndarray:
        """Max cosine against the in-domain set for each input sentence."""
        q_off, q_terms, q_weights, q_norms = self._pack_queries(sentences)
        out = np.zeros(len(q_off) - 1, dtype=np.float64)
        kernels.tfidf_max_cosines(
            q_off, q_terms, q_weights, q_norms,
            self.term_off, self.post_docs, self.post_weights, self.doc_norms,
            out,
        )
        return out

    def max_cosine(self, sentence) -> float:
        return float(self.max_cosines([sentence])[0])


def repr_lm_in(lm_in, sentence) -> float:
    """Average log-probability under the in-domain LM; higher = more
    representative."""
    return lm_in.sentence_logprob_avg(sentence)


def repr_tfidf(sentence, index: TfIdfIndex) -> float:
    return index.max_cosine(sentence)


def repr_embed(sentence, embedder, in_domain_embeddings) -> float:
    """Max cosine between the sentence embedding and each in-domain
    embedding."""
    v = np.asarray(embedder.embed(sentence), dtype=float)
    vn = np.linalg.norm(v)
    if vn == 0:
        return 0.0
    best = -1.0
    for e in in_domain_embeddings:
        e = np.asarray(e, dtype=float)
        en = np.linalg.norm(e)
        if en == 0:
            continue
        best = max(best, float(np.dot(v, e) / (vn * en)))
    return best


def simp_lm_gen(lm_gen, sentence) -> float:
    """Average log-probability under the general-domain LM; higher =
    simpler."""
    return lm_gen.sentence_logprob_avg(sentence)


def simp_round_trip(sentence, fwd_translator, bwd_translator, smoothing: str = "add1") -> float:
    """Round-trip BLEU: translate with the forward model, back-translate with
    the backward model, score the reconstruction against the original."""
    tokens = _token_seq(sentence)
    sid = getattr(sentence, "id", 0)
    mid = fwd_translator.translate(sentence)
    back = bwd_translator.translate(Sentence(id=sid, tokens=tuple(mid), raw=" ".join(mid)))
    return sentence_bleu(back, tokens, smoothing=smoothing)


def moore_lewis(lm_in, lm_gen, sentence) -> float:
    """In-domain minus general-domain average log-probability; equals
    repr_lm_in - simp_lm_gen by construction."""
    return repr_lm_in(lm_in, sentence) - simp_lm_gen(lm_gen, sentence)


def minmax_normalize(raw: dict[int, float]) -> dict[int, float]:
    """Affine map of a score table onto [0, 1]; order preserving. All-equal
    inputs collapse to 0.5 everywhere with a warning (degenerate metric)."""
    if not raw:
        raise DataError("cannot normalize an empty score table")
    lo = min(raw.values())
    hi = max(raw.values())
    if hi == lo:
        logger.warning("degenerate metric: all %d scores equal %g", len(raw), lo)
        return {k: 0.5 for k in raw}
    span = hi - lo
    return {k: (v - lo) / span for k, v in raw.items()}


@dataclass
class ScoreTable:
    """Raw and normalized representativeness/simplicity scores per sentence
    id, with the metric names that produced them."""

    repr_metric: str
    simp_metric: str
    raw_repr: dict[int, float]
    raw_simp: dict[int, float]
    norm_repr: dict[int, float]
    norm_simp: dict[int, float]

    @classmethod
    def build(cls, repr_metric, simp_metric, raw_repr, raw_simp):
        if set(raw_repr) != set(raw_simp):
            raise DataError("representativeness and simplicity cover different ids")
        return cls(
            repr_metric=repr_metric,
            simp_metric=simp_metric,
            raw_repr=dict(raw_repr),
            raw_simp=dict(raw_simp),
            norm_repr=minmax_normalize(raw_repr),
            norm_simp=minmax_normalize(raw_simp),
        )

    def ids(self):
        return sorted(self.raw_repr)
