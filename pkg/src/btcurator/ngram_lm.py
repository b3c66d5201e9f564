"""Order-n language model with interpolated modified Kneser-Ney smoothing.

Counts for the highest order come from sentence-padded data; every lower
order uses continuation counts (number of distinct one-token left
extensions). Discounts follow the count-of-counts formula
D_k = k - (k+1) * Y * n_{k+1} / n_k with Y = n1 / (n1 + 2 n2), estimated per
order; when the count-of-counts are too degenerate for the formula the model
falls back to absolute discounting with D = 0.75 and logs a warning.

All scores are natural-log average per-token log-probabilities. The
end-of-sentence sentinel is predicted and counted as a scored position; the
begin sentinel only ever appears in contexts.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from .errors import DataError

logger = logging.getLogger(__name__)

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

MAX_ORDER = 6


@dataclass(frozen=True)
class SmoothingConfig:
    mode: str = "modified_kn"  # "modified_kn" | "mle" (test mode, no sentinels)
    fallback_discount: float = 0.75


class NGramLM:
    """Trained model: interpolated probabilities plus backoff weights.

    probs maps every observed n-gram (and every unigram of the predicted
    vocabulary) to its interpolated probability; backoffs maps contexts to
    their leftover-mass weight. Immutable after training.
    """

    def __init__(self, order, vocab, probs, backoffs, discounts, mode="modified_kn"):
        self.order = order
        self.vocab = frozenset(vocab)  # predicted vocabulary: tokens + EOS + UNK
        self.probs = probs
        self.backoffs = backoffs
        self.discounts = discounts  # per order n: (D1, D2, D3+)
        self.mode = mode

    def _map_word(self, w: str) -> str:
        return w if w in self.vocab else UNK

    def prob(self, word: str, context) -> float:
        """P(word | context), context truncated to order-1 most recent tokens.
        OOV words (in the prediction slot or the context) map to <unk>."""
        if self.mode == "mle":
            return self._mle_prob(word, context)
        w = self._map_word(word)
        ctx = tuple(
            t if (t == BOS or t in self.vocab) else UNK for t in context
        )[-(self.order - 1) :] if self.order > 1 else ()
        return self._backoff_prob(w, ctx)

    def _backoff_prob(self, w: str, ctx: tuple) -> float:
        while True:
            g = ctx + (w,)
            p = self.probs.get(g)
            if p is not None:
                return p
            if not ctx:
                # unigrams cover the whole predicted vocabulary
                return self.probs[(UNK,)]
            bo = self.backoffs.get(ctx)
            ctx = ctx[1:]
            if bo is not None:
                return bo * self._backoff_prob(w, ctx)

    def _mle_prob(self, word: str, context) -> float:
        ctx = tuple(context)[-(self.order - 1) :] if self.order > 1 else ()
        while True:
            num = self.probs.get(ctx + (word,))  # raw counts in mle mode
            den = self.probs.get(ctx) if ctx else self._mle_total
            if num is not None and den:
                return num / den
            if not ctx:
                return 0.0
            ctx = ctx[1:]

    def logprob(self, word: str, context) -> float:
        p = self.prob(word, context)
        return math.log(p) if p > 0.0 else float("-inf")

    def sentence_logprob_avg(self, tokens) -> float:
        """(1/|s|) sum_t log P(s_t | s_<t) in nats; includes the end sentinel
        (KN mode), so |s| = len(tokens) + 1 scored positions."""
        tokens = _token_seq(tokens)
        if not tokens:
            raise DataError("cannot score an empty sentence")
        if self.mode == "mle":
            total = sum(self.logprob(w, tokens[:i]) for i, w in enumerate(tokens))
            return total / len(tokens)
        hist = (BOS,) * (self.order - 1) + tuple(tokens)
        total = 0.0
        for i, w in enumerate(tokens):
            total += self.logprob(w, hist[: self.order - 1 + i])
        total += self.logprob(EOS, hist)
        return total / (len(tokens) + 1)

    def perplexity(self, corpus) -> float:
        """exp of minus the mean per-token log-probability over the corpus."""
        total = 0.0
        positions = 0
        n = 0
        for sent in corpus:
            tokens = _token_seq(sent)
            scored = len(tokens) + (0 if self.mode == "mle" else 1)
            total += self.sentence_logprob_avg(tokens) * scored
            positions += scored
            n += 1
        if n == 0:
            raise DataError("perplexity of an empty corpus")
        return math.exp(-total / positions)


def _token_seq(sent):
    tokens = getattr(sent, "tokens", sent)
    return list(tokens)


def _estimate_discounts(count_values, fallback: float):
    """(D1, D2, D3+) from count-of-counts; falls back to absolute
    discounting when the formula is undefined or out of range."""
    coc = Counter(count_values)
    n1, n2, n3, n4 = coc[1], coc[2], coc[3], coc[4]
    if n1 > 0 and n2 > 0 and n3 > 0:
        y = n1 / (n1 + 2.0 * n2)
        d = (
            1.0 - 2.0 * y * n2 / n1,
            2.0 - 3.0 * y * n3 / n2,
            3.0 - 4.0 * y * n4 / n3,
        )
        if 0.0 < d[0] <= 1.0 and 0.0 < d[1] <= 2.0 and 0.0 < d[2] <= 3.0:
            return d, False
    return (fallback, fallback, fallback), True


def _discount_for(count: int, d) -> float:
    return d[min(count, 3) - 1]


def train_lm(corpus, order: int, config: SmoothingConfig | None = None) -> NGramLM:
    """Train an order-n LM on a corpus (iterable of Sentence or token lists)."""
    config = config or SmoothingConfig()
    if not 1 <= order <= MAX_ORDER:
        raise DataError(f"order must be in [1, {MAX_ORDER}], got {order}")
    sentences = [_token_seq(s) for s in corpus]
    if not sentences:
        raise DataError("cannot train on an empty corpus")

    if config.mode == "mle":
        return _train_mle(sentences, order)
    if config.mode != "modified_kn":
        raise DataError(f"unknown smoothing mode {config.mode!r}")

    # highest-order counts from padded sentences
    counts: list[dict] = [dict() for _ in range(order + 1)]
    top = counts[order]
    for tokens in sentences:
        padded = (BOS,) * (order - 1) + tuple(tokens) + (EOS,)
        for i in range(len(padded) - order + 1):
            g = padded[i : i + order]
            top[g] = top.get(g, 0) + 1

    # continuation counts for lower orders: distinct one-token left extensions
    for n in range(order - 1, 0, -1):
        lower = counts[n]
        for g in counts[n + 1]:
            sfx = g[1:]
            lower[sfx] = lower.get(sfx, 0) + 1

    vocab = {t for tokens in sentences for t in tokens} | {EOS, UNK}
    nvocab = len(vocab)

    discounts = {}
    fell_back = []
    for n in range(1, order + 1):
        d, fb = _estimate_discounts(counts[n].values(), config.fallback_discount)
        discounts[n] = d
        if fb:
            fell_back.append(n)
    if fell_back:
        logger.warning(
            "degenerate count-of-counts at order(s) %s; using absolute "
            "discounting with D=%.2f there",
            fell_back,
            config.fallback_discount,
        )

    probs: dict[tuple, float] = {}
    backoffs: dict[tuple, float] = {}

    # unigram level: empty context, uniform 1/V base distribution underneath
    c1 = counts[1]
    total1 = sum(c1.values())
    d1 = discounts[1]
    cats = Counter(min(c, 3) for c in c1.values())
    gamma0 = (d1[0] * cats[1] + d1[1] * cats[2] + d1[2] * cats[3]) / total1
    for w in vocab:
        c = c1.get((w,), 0)
        base = (c - _discount_for(c, d1)) / total1 if c > 0 else 0.0
        probs[(w,)] = base + gamma0 / nvocab

    for n in range(2, order + 1):
        by_ctx = defaultdict(list)
        for g, c in counts[n].items():
            by_ctx[g[:-1]].append((g[-1], c))
        dn = discounts[n]
        for ctx, conts in by_ctx.items():
            denom = sum(c for _, c in conts)
            cat = Counter(min(c, 3) for _, c in conts)
            gamma = (dn[0] * cat[1] + dn[1] * cat[2] + dn[2] * cat[3]) / denom
            backoffs[ctx] = gamma
            for w, c in conts:
                lower = probs[ctx[1:] + (w,)]
                probs[ctx + (w,)] = (c - _discount_for(c, dn)) / denom + gamma * lower

    return NGramLM(order, vocab, probs, backoffs, discounts)


def _train_mle(sentences, order: int) -> NGramLM:
    # raw conditional frequencies over bare tokens; no sentinels, no smoothing
    counts: dict[tuple, float] = {}
    total = 0
    for tokens in sentences:
        tokens = tuple(tokens)
        total += len(tokens)
        for n in range(1, order + 1):
            for i in range(len(tokens) - n + 1):
                g = tokens[i : i + n]
                counts[g] = counts.get(g, 0) + 1
    vocab = {t for tokens in sentences for t in tokens}
    lm = NGramLM(order, vocab, counts, {}, {}, mode="mle")
    lm._mle_total = total
    return lm


def sentence_logprob_avg(lm: NGramLM, sentence) -> float:
    return lm.sentence_logprob_avg(sentence)


def perplexity(lm: NGramLM, corpus) -> float:
    return lm.perplexity(corpus)


# --- ARPA interchange -------------------------------------------------------

_LOG10 = math.log(10.0)


def dump_arpa(lm: NGramLM, path: str) -> None:
    """Write the model as a standard ARPA file (log10 probabilities)."""
    if lm.mode != "modified_kn":
        raise DataError("only smoothed models can be exported to ARPA")
    grams: dict[int, list] = {n: [] for n in range(1, lm.order + 1)}
    for g, p in lm.probs.items():
        grams[len(g)].append((g, p))
    # contexts with no probability of their own (BOS-initial grams) still
    # need a row to carry their backoff weight; -99 marks "never predicted"
    for ctx in lm.backoffs:
        if ctx not in lm.probs:
            grams[len(ctx)].append((ctx, None))
    with open(path, "w", encoding="utf-8") as f:
        f.write("\\data\\\n")
        for n in range(1, lm.order + 1):
            f.write(f"ngram {n}={len(grams[n])}\n")
        for n in range(1, lm.order + 1):
            f.write(f"\n\\{n}-grams:\n")
            for g, p in sorted(grams[n]):
                logp = -99.0 if p is None else math.log10(p)
                line = f"{logp:.17g}\t{' '.join(g)}"
                bo = lm.backoffs.get(g)
                if bo is not None and n < lm.order:
                    line += f"\t{math.log10(bo):.17g}"
                f.write(line + "\n")
        f.write("\n\\end\\\n")


def load_arpa(path: str) -> NGramLM:
    """Read an ARPA file back into a scoring-equivalent model."""
    probs: dict[tuple, float] = {}
    backoffs: dict[tuple, float] = {}
    order = 0
    try:
        f = open(path, encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read ARPA file {path}: {e}") from e
    with f:
        section = None
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("\\") and line.endswith("-grams:"):
                section = int(line[1:].split("-")[0])
                order = max(order, section)
                continue
            if line in ("\\data\\", "\\end\\") or line.startswith("ngram "):
                section = None if line != "\\end\\" else section
                continue
            if section is None:
                continue
            parts = line.split()
            if len(parts) not in (section + 1, section + 2):
                raise DataError(f"{path}: bad row in \\{section}-grams: {line!r}")
            try:
                logp = float(parts[0])
                g = tuple(parts[1 : section + 1])
                if len(parts) == section + 2:
                    backoffs[g] = 10.0 ** float(parts[-1])
            except ValueError as e:
                raise DataError(f"{path}: bad ARPA row {line!r}") from e
            if logp > -98.0:
                probs[g] = 10.0 ** logp
    if order == 0 or not probs:
        raise DataError(f"{path}: no n-gram sections found")
    vocab = {g[0] for g in probs if len(g) == 1 and g[0] != BOS} | {EOS, UNK}
    return NGramLM(order, vocab, probs, backoffs, {})
