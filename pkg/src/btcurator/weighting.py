"""Quality weights for back-translated pairs.

Two current-quality metrics (encoder-embedding cosine, forward/backward
agreement), an improvement factor comparing against the sentence's previous
quality, and their multiplicative composition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightConfig:
    quality_metric: str = "enc"  # "enc" | "agree"
    improvement: bool = True
    w_low: float = 0.5
    w_high: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.w_low <= 1.0 <= self.w_high:
            raise ConfigError(
                f"clip bounds must satisfy 0 < w_low <= 1 <= w_high, "
                f"got ({self.w_low}, {self.w_high})"
            )
        if self.quality_metric not in ("enc", "agree"):
            raise ConfigError(f"unknown quality metric {self.quality_metric!r}")


@dataclass
class QualityStore:
    """Last observed quality score per (direction, sentence id)."""

    scores: dict[tuple[str, int], float] = field(default_factory=dict)

    def get(self, direction: str, sid: int):
        return self.scores.get((direction, sid))

    def update(self, direction: str, sid: int, quality: float) -> None:
        self.scores[(direction, sid)] = quality

    def save(self, path: str, direction: str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for (d, sid), q in sorted(self.scores.items()):
                if d == direction:
                    f.write(f"{sid}\t{q!r}\n")

    def load(self, path: str, direction: str) -> None:
        with open(path, encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                sid, q = line.split("\t")
                self.scores[(direction, int(sid))] = float(q)


@dataclass
class WeightedPair:
    source_tokens: list[str]  # synthetic (back-translated) side
    target_tokens: list[str]  # genuine monolingual side
    quality: float
    imp: float
    weight: float
    epoch: int
    direction: str
    sentence_id: int


def enc_weight(x, y, embedder_src, embedder_tgt) -> float:
    """Cosine of the pooled source/target sentence representations, clamped
    below at 0 so downstream loss weights stay positive."""
    ex = np.asarray(embedder_src.embed(x), dtype=float)
    ey = np.asarray(embedder_tgt.embed(y), dtype=float)
    if ex.shape != ey.shape:
        raise DataError(
            f"embedder dimension mismatch: {ex.shape} vs {ey.shape}"
        )
    nx, ny = np.linalg.norm(ex), np.linalg.norm(ey)
    if nx == 0 or ny == 0:
        return 0.0
    return max(0.0, float(np.dot(ex, ey) / (nx * ny)))


def agree_weight(x, y, fwd_translator, bwd_translator) -> float:
    """exp(-|H_fwd(y|x) - H_bwd(x|y)|) with length-normalized conditional
    NLLs; 1 means the two models fully agree."""
    h_fwd = fwd_translator.cond_nll(y, x)
    h_bwd = bwd_translator.cond_nll(x, y)
    return math.exp(-abs(h_fwd - h_bwd))


def imp_factor(current: float, previous, config: WeightConfig) -> float:
    """Clipped current/previous quality ratio; 1.0 on first encounter (no
    stored previous quality)."""
    if previous is None:
        return 1.0
    if previous <= 0.0:
        logger.warning("stored previous quality %g <= 0; treating as first sight", previous)
        return 1.0
    return min(max(current / previous, config.w_low), config.w_high)


def final_weight(quality: float, imp: float, config: WeightConfig) -> float:
    """quality * imp when improvement weighting is enabled, else quality."""
    return quality * imp if config.improvement else quality
