"""Curriculum schedule, combined scoring, top-p%% selection and selection
diversity statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DataError


@dataclass(frozen=True)
class ScheduleConfig:
    """Square-root growing balance: lambda(t) = min(1, sqrt(t(1-c0^2)/T) + c0^2).

    c0 is the initial balance, T the epoch after which only
    representativeness counts. The first selection epoch is t=0, so it runs
    at lambda = c0^2 (maximal simplicity emphasis).
    """

    c0: float = 0.1
    T: int = 5

    def __post_init__(self):
        if not 0.0 <= self.c0 < 1.0:
            raise ConfigError(f"c0 must be in [0, 1), got {self.c0}")
        if self.T < 1:
            raise ConfigError(f"T must be >= 1, got {self.T}")


@dataclass(frozen=True)
class SelectionConfig:
    p: float = 30.0  # percentage of the corpus selected per epoch

    def __post_init__(self):
        if not 0.0 < self.p <= 100.0:
            raise ConfigError(f"p must be in (0, 100], got {self.p}")

    def count(self, n: int) -> int:
        return max(1, math.floor(self.p * n / 100.0))


@dataclass
class SelectionEpoch:
    epoch: int
    lam: float
    selected: list[int]  # ids, highest combined score first
    scores: dict[int, float]  # combined score per selected id

    @property
    def selected_set(self) -> frozenset:
        return frozenset(self.selected)


def lambda_at(t: int, config: ScheduleConfig) -> float:
    """Balance value at epoch t; nondecreasing, clamped at 1."""
    if t < 0:
        raise ConfigError(f"epoch must be >= 0, got {t}")
    c0sq = config.c0 ** 2
    return min(1.0, math.sqrt(t * (1.0 - c0sq) / config.T) + c0sq)


def combined_score(norm_repr: float, norm_simp: float, lam: float) -> float:
    """Convex combination lam * repr + (1 - lam) * simp."""
    return lam * norm_repr + (1.0 - lam) * norm_simp


def select_top(scored: dict[int, float], config: SelectionConfig, epoch: int = 0,
               lam: float = 0.0) -> SelectionEpoch:
    """Pick the floor(p*N/100) (min 1) highest-scoring ids; ties break to the
    lower sentence id so reruns and parallel scoring are deterministic."""
    if not scored:
        raise DataError("cannot select from an empty score table")
    k = config.count(len(scored))
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return SelectionEpoch(
        epoch=epoch,
        lam=lam,
        selected=[sid for sid, _ in ranked],
        scores={sid: sc for sid, sc in ranked},
    )


def replacement_stats(history: list[SelectionEpoch], corpus_size: int):
    """Per-epoch replaced fraction (starting at the second epoch) and
    cumulative coverage of the monolingual corpus.

    replaced(t) = |selected(t) \\ selected(t-1)| / |selected(t)|;
    coverage = |union of all selections| / N.
    """
    if len(history) < 2:
        raise DataError("replacement stats need at least 2 epochs")
    replaced = []
    union: set[int] = set(history[0].selected)
    for prev, cur in zip(history, history[1:]):
        cur_set = cur.selected_set
        replaced.append(len(cur_set - prev.selected_set) / len(cur_set))
        union |= cur_set
    return replaced, len(union) / corpus_size
