"""BLEU, unigram distributions and Hellinger distance."""

from __future__ import annotations

import math
from collections import Counter

from .errors import DataError

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _ngram_counts(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(hypotheses, references, max_order: int = 4, smoothing: str = "none") -> float:
    """Corpus-level BLEU in [0, 1].

    Geometric mean of modified n-gram precisions times the brevity penalty
    exp(min(0, 1 - ref_len/hyp_len)). Orders whose hypothesis n-gram pool is
    empty (hypotheses shorter than the order) are skipped. smoothing="add1"
    adds one to numerator and denominator of every order >= 2, which is the
    sentence-level default; smoothing="none" returns 0 as soon as any counted
    precision is 0.
    """
    if smoothing not in ("none", "add1"):
        raise ValueError(f"unknown smoothing mode {smoothing!r}")
    hyps = list(hypotheses)
    refs = list(references)
    if not hyps:
        raise DataError("bleu: empty hypothesis set")
    if len(hyps) != len(refs):
        raise DataError(f"bleu: {len(hyps)} hypotheses vs {len(refs)} references")

    matched = [0] * max_order
    total = [0] * max_order
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps, refs):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_order + 1):
            hyp_counts = _ngram_counts(hyp, n)
            if not hyp_counts:
                continue
            ref_counts = _ngram_counts(ref, n)
            total[n - 1] += sum(hyp_counts.values())
            matched[n - 1] += sum(
                min(c, ref_counts[g]) for g, c in hyp_counts.items()
            )

    log_prec_sum = 0.0
    orders_used = 0
    for n in range(1, max_order + 1):
        num, den = matched[n - 1], total[n - 1]
        if den == 0:
            continue
        if smoothing == "add1" and n >= 2:
            num, den = num + 1, den + 1
        if num == 0:
            return 0.0
        log_prec_sum += math.log(num / den)
        orders_used += 1
    if orders_used == 0 or hyp_len == 0:
        return 0.0
    bp = math.exp(min(0.0, 1.0 - ref_len / hyp_len))
    return bp * math.exp(log_prec_sum / orders_used)


def sentence_bleu(hypothesis, reference, max_order: int = 4, smoothing: str = "add1") -> float:
    """Sentence-level BLEU; add-one smoothing by default so short noisy
    sentences still rank instead of collapsing to 0."""
    return bleu([hypothesis], [reference], max_order=max_order, smoothing=smoothing)


def unigram_dist(sentences) -> dict[str, float]:
    """Relative token frequencies over a set of token sequences."""
    counts: Counter = Counter()
    for tokens in sentences:
        counts.update(tokens)
    total = sum(counts.values())
    if total == 0:
        raise DataError("unigram_dist: empty sentence set")
    return {tok: c / total for tok, c in counts.items()}


def _check_dist(dist, name: str) -> None:
    s = sum(dist.values())
    if abs(s - 1.0) > 1e-9:
        raise DataError(f"hellinger: {name} sums to {s}, not 1")
    if any(p < 0 for p in dist.values()):
        raise DataError(f"hellinger: {name} has negative mass")


def hellinger(p: dict[str, float], q: dict[str, float]) -> float:
    """Hellinger distance (1/sqrt(2)) * sqrt(sum (sqrt(p_i) - sqrt(q_i))^2)
    over the union vocabulary; 0 iff identical, 1 iff disjoint supports."""
    _check_dist(p, "P")
    _check_dist(q, "Q")
    acc = 0.0
    for tok in p.keys() | q.keys():
        acc += (math.sqrt(p.get(tok, 0.0)) - math.sqrt(q.get(tok, 0.0))) ** 2
    return min(1.0, _INV_SQRT2 * math.sqrt(acc))
