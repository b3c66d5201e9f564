"""Pluggable translation and sentence-embedding providers.

The trainable provider is a lexical translation model (IBM Model 1 without a
NULL word) so the whole selection/weighting loop runs at desk scale; real NMT
systems plug in through the offline file format instead.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DataError, ProviderError

NLL_FLOOR = 1e-10


def _token_seq(sent):
    tokens = getattr(sent, "tokens", sent)
    return list(tokens)


def _sentence_id(sent, default=0):
    return getattr(sent, "id", default)


@dataclass
class LexiconModel:
    """t(target word | source word) for all co-occurring pairs; each source
    row sums to 1."""

    table: dict[str, dict[str, float]]
    source_vocab: frozenset
    target_vocab: frozenset
    loglik_history: list[float] = field(default_factory=list)
    _argmax: dict[str, str] = field(default_factory=dict, repr=False)

    def best_target(self, word: str) -> str:
        if word not in self._argmax:
            row = self.table.get(word)
            if not row:
                return word  # OOV copy-through
            self._argmax[word] = min(row.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        return self._argmax[word]

    def t(self, target: str, source: str) -> float:
        return self.table.get(source, {}).get(target, 0.0)


def train_model1(parallel, em_iterations: int = 10) -> LexiconModel:
    """EM for the lexical table: uniform initialization over co-occurring
    pairs, then standard expectation / per-source-row normalization sweeps."""
    if em_iterations < 1:
        raise DataError("em_iterations must be >= 1")
    pairs = [( _token_seq(s), _token_seq(t)) for s, t in parallel.pairs()]
    if not pairs:
        raise DataError("cannot train Model 1 on an empty parallel corpus")

    src_ids: dict[str, int] = {}
    pair_ids: dict[tuple[str, str], int] = {}
    for xs, ys in pairs:
        for x in xs:
            src_ids.setdefault(x, len(src_ids))
            for y in ys:
                pair_ids.setdefault((x, y), len(pair_ids))

    n_pairs = len(pair_ids)
    pair_src = np.empty(n_pairs, dtype=np.int32)
    for (x, _y), k in pair_ids.items():
        pair_src[k] = src_ids[x]

    # uniform rows over co-occurring targets
    row_deg = np.zeros(len(src_ids), dtype=np.float64)
    for (x, _y), k in pair_ids.items():
        row_deg[src_ids[x]] += 1.0
    t = 1.0 / row_deg[pair_src]

    x_off = np.zeros(len(pairs) + 1, dtype=np.int64)
    y_off = np.zeros(len(pairs) + 1, dtype=np.int64)
    k_off = np.zeros(len(pairs) + 1, dtype=np.int64)
    for s, (xs, ys) in enumerate(pairs):
        x_off[s + 1] = x_off[s] + len(xs)
        y_off[s + 1] = y_off[s] + len(ys)
        k_off[s + 1] = k_off[s] + len(xs) * len(ys)
    k_flat = np.empty(k_off[-1], dtype=np.int32)
    pos = 0
    for xs, ys in pairs:
        for y in ys:
            for x in xs:
                k_flat[pos] = pair_ids[(x, y)]
                pos += 1

    logliks = []
    for _ in range(em_iterations):
        counts = np.zeros(n_pairs, dtype=np.float64)
        row_total = np.zeros(len(src_ids), dtype=np.float64)
        ll = kernels.model1_estep(
            t, k_off, x_off, y_off, k_flat, pair_src, counts, row_total
        )
        logliks.append(ll)
        t = counts / row_total[pair_src]

    table: dict[str, dict[str, float]] = {x: {} for x in src_ids}
    for (x, y), k in pair_ids.items():
        table[x][y] = float(t[k])
    tgt_vocab = frozenset(y for _x, y in pair_ids)
    return LexiconModel(
        table=table,
        source_vocab=frozenset(src_ids),
        target_vocab=tgt_vocab,
        loglik_history=logliks,
    )


def translate(model: LexiconModel, sentence) -> list[str]:
    """Word-by-word argmax decoding; ties break to the lexicographically
    smaller target, OOV source words are copied through unchanged."""
    return [model.best_target(w) for w in _token_seq(sentence)]


def cond_nll(model: LexiconModel, target, source) -> float:
    """Length-normalized negative conditional log-likelihood (nats/token):
    -(1/|y|) sum_j log((1/|x|) sum_i t(y_j|x_i)), each t floored at 1e-10."""
    ys = _token_seq(target)
    xs = _token_seq(source)
    if not ys or not xs:
        raise DataError("cond_nll of an empty sentence")
    total = 0.0
    for y in ys:
        inner = sum(max(model.t(y, x), NLL_FLOOR) for x in xs) / len(xs)
        total += math.log(inner)
    return -total / len(ys)


def noisy_translate(model: LexiconModel, sentence, noise_rate: float, seed: int) -> list[str]:
    """translate() then replace each token with a random target-vocabulary
    token with probability noise_rate; the RNG substream is derived from
    (seed, sentence id) so parallel execution is order-independent."""
    out = translate(model, sentence)
    if noise_rate <= 0.0:
        return out
    vocab = sorted(model.target_vocab)
    rng = np.random.default_rng([seed, _sentence_id(sentence)])
    for i in range(len(out)):
        if rng.random() < noise_rate:
            out[i] = vocab[rng.integers(len(vocab))]
    return out


class Model1Translator:
    """Translator interface over a LexiconModel, optionally noisy."""

    def __init__(self, model: LexiconModel, direction: str, noise_rate: float = 0.0, seed: int = 0):
        self.model = model
        self.direction = direction
        self.noise_rate = noise_rate
        self.seed = seed

    def translate(self, sentence) -> list[str]:
        if self.noise_rate > 0.0:
            return noisy_translate(self.model, sentence, self.noise_rate, self.seed)
        return translate(self.model, sentence)

    def cond_nll(self, target, source) -> float:
        return cond_nll(self.model, target, source)


class OfflineTranslator:
    """Translations and NLL values precomputed by an external system and read
    from an id-keyed file: "<id>\\t<translated tokens>\\t<nll>" per line."""

    def __init__(self, path: str, direction: str):
        self.direction = direction
        self.translations: dict[int, list[str]] = {}
        self.nlls: dict[int, float] = {}
        try:
            f = open(path, encoding="utf-8")
        except OSError as e:
            raise ProviderError(f"cannot read offline translation file {path}: {e}") from e
        with f:
            for lineno, line in enumerate(f):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ProviderError(f"{path}:{lineno}: expected 3 tab fields")
                try:
                    sid = int(parts[0])
                    nll = float(parts[2])
                except ValueError as e:
                    raise ProviderError(f"{path}:{lineno}: bad id or nll") from e
                self.translations[sid] = parts[1].split()
                self.nlls[sid] = nll

    def translate(self, sentence) -> list[str]:
        sid = _sentence_id(sentence, default=None)
        if sid not in self.translations:
            raise ProviderError(f"no offline translation for sentence id {sid}")
        return list(self.translations[sid])

    def cond_nll(self, target, source) -> float:
        for sent in (source, target):
            sid = _sentence_id(sent, default=None)
            if sid in self.nlls:
                return self.nlls[sid]
        raise ProviderError("no offline nll for either side of the pair")


# --- sentence embedders -----------------------------------------------------


class BagEmbedder:
    """Deterministic bag-of-tokens embedder: each token hashes to a unit
    vector, the sentence embedding is the L2-normalized sum. token_map lets
    two languages share one vector space (map target tokens to their source
    partners before hashing)."""

    def __init__(self, dim: int, seed: int = 0, token_map: dict[str, str] | None = None):
        if dim < 1:
            raise DataError("embedder dimension must be >= 1")
        self.dim = dim
        self.seed = seed
        self.token_map = token_map or {}
        self._cache: dict[str, np.ndarray] = {}

    def _token_vec(self, token: str) -> np.ndarray:
        token = self.token_map.get(token, token)
        vec = self._cache.get(token)
        if vec is None:
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            rng = np.random.default_rng([self.seed, int.from_bytes(digest, "big")])
            vec = rng.standard_normal(self.dim)
            vec /= np.linalg.norm(vec)
            self._cache[token] = vec
        return vec

    def embed(self, sentence) -> np.ndarray:
        tokens = _token_seq(sentence)
        if not tokens:
            raise DataError("cannot embed an empty sentence")
        total = np.zeros(self.dim)
        for tok in tokens:
            total += self._token_vec(tok)
        norm = np.linalg.norm(total)
        return total / norm if norm > 0 else total


class FileEmbedder:
    """Embeddings keyed by sentence id, loaded from a plain text table."""

    def __init__(self, dim: int, vectors: dict[int, np.ndarray]):
        self.dim = dim
        self.vectors = vectors

    def embed(self, sentence) -> np.ndarray:
        sid = _sentence_id(sentence, default=None)
        if sid not in self.vectors:
            raise ProviderError(f"missing embedding for sentence id {sid}")
        return self.vectors[sid]


def load_embedding_file(path: str) -> FileEmbedder:
    """Read an embedding table: header "dim N", then "<id> v1 ... vN" rows."""
    try:
        f = open(path, encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read embedding file {path}: {e}") from e
    with f:
        header = f.readline().split()
        if len(header) != 2 or header[0] != "dim":
            raise DataError(f"{path}: expected 'dim N' header")
        dim = int(header[1])
        vectors: dict[int, np.ndarray] = {}
        for lineno, line in enumerate(f, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != dim + 1:
                raise DataError(
                    f"{path}:{lineno}: expected {dim + 1} fields, got {len(parts)}"
                )
            try:
                sid = int(parts[0])
                vec = np.array([float(v) for v in parts[1:]])
            except ValueError as e:
                raise DataError(f"{path}:{lineno}: unparseable row") from e
            vectors[sid] = vec
    return FileEmbedder(dim, vectors)
