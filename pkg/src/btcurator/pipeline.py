"""Iterative back-translation driver with curriculum selection and weighting.

Direction naming: "f2e" produces weighted training pairs for the F->E model,
so it selects from the target-language monolingual pool and back-translates
with the E->F model; "e2f" is the mirror image. The curriculum clock advances
once per full bidirectional epoch.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field

from . import scoring, translator as tr
from .corpus import Corpus, TokenizerConfig, load_corpus, load_parallel_corpus
from .curriculum import (
    ScheduleConfig,
    SelectionConfig,
    SelectionEpoch,
    combined_score,
    lambda_at,
    replacement_stats,
    select_top,
)
from .errors import ConfigError, DataError
from .metrics import hellinger, unigram_dist
from .ngram_lm import train_lm
from .weighting import (
    QualityStore,
    WeightConfig,
    WeightedPair,
    agree_weight,
    enc_weight,
    final_weight,
    imp_factor,
)

logger = logging.getLogger(__name__)

DIRECTIONS = ("f2e", "e2f")

REPR_METRICS = ("tfidf", "lm_in", "embed")
SIMP_METRICS = ("rbleu", "lm_gen")


@dataclass
class RunConfig:
    source_mono: str
    target_mono: str
    parallel_source: str
    parallel_target: str
    output_dir: str
    in_domain_source: str | None = None
    in_domain_target: str | None = None
    repr_metric: str = "tfidf"
    simp_metric: str = "rbleu"
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    weighting: WeightConfig = field(default_factory=WeightConfig)
    epochs: int = 6
    seed: int = 0
    lm_order: int = 3
    em_iterations: int = 10
    noise_rate: float = 0.0
    embed_dim: int = 64
    token_map_path: str | None = None
    embedding_source_path: str | None = None
    embedding_target_path: str | None = None
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    dedup: bool = False

    def __post_init__(self):
        if self.repr_metric not in REPR_METRICS:
            raise ConfigError(f"unknown repr metric {self.repr_metric!r}")
        if self.simp_metric not in SIMP_METRICS:
            raise ConfigError(f"unknown simp metric {self.simp_metric!r}")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.repr_metric in ("tfidf", "lm_in", "embed") and not (
            self.in_domain_source and self.in_domain_target
        ):
            raise ConfigError(
                f"repr metric {self.repr_metric!r} needs in-domain reference "
                "corpora on both sides"
            )

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        try:
            for key, sub in (
                ("schedule", ScheduleConfig),
                ("selection", SelectionConfig),
                ("weighting", WeightConfig),
                ("tokenizer", TokenizerConfig),
            ):
                if key in d and isinstance(d[key], dict):
                    d[key] = sub(**d[key])
            return cls(**d)
        except TypeError as e:
            raise ConfigError(f"bad run config: {e}") from e

    @classmethod
    def from_json(cls, path: str) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as f:
                return cls.from_dict(json.load(f))
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from e

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["schedule"] = {"c0": self.schedule.c0, "T": self.schedule.T}
        d["selection"] = {"p": self.selection.p}
        d["weighting"] = {
            "quality_metric": self.weighting.quality_metric,
            "improvement": self.weighting.improvement,
            "w_low": self.weighting.w_low,
            "w_high": self.weighting.w_high,
        }
        d["tokenizer"] = {
            "mode": self.tokenizer.mode,
            "lowercase": self.tokenizer.lowercase,
        }
        return d


@dataclass
class DirectionReport:
    selected: int
    pairs: int
    mean_repr: float
    mean_simp: float
    mean_weight: float
    min_weight: float
    max_weight: float
    replaced_frac: float | None
    hellinger_to_ref: float | None


@dataclass
class EpochReport:
    epoch: int
    lam: float
    directions: dict[str, DirectionReport]


@dataclass
class RunState:
    t: int = 0
    stores: dict[str, QualityStore] = field(
        default_factory=lambda: {d: QualityStore() for d in DIRECTIONS}
    )
    history: dict[str, list[SelectionEpoch]] = field(
        default_factory=lambda: {d: [] for d in DIRECTIONS}
    )
    score_tables: dict[str, scoring.ScoreTable] = field(default_factory=dict)


class Pipeline:
    """Owns the immutable resources (corpora, models, indexes, embedders) and
    drives the per-epoch select / back-translate / weight loop."""

    def __init__(self, config: RunConfig):
        self.config = config
        tok = config.tokenizer
        self.mono = {
            "f": load_corpus(config.source_mono, "f", tok, dedup=config.dedup),
            "e": load_corpus(config.target_mono, "e", tok, dedup=config.dedup),
        }
        self.parallel = load_parallel_corpus(
            config.parallel_source, config.parallel_target, "f", "e", tok
        )
        self.in_domain = {}
        if config.in_domain_source:
            self.in_domain["f"] = load_corpus(config.in_domain_source, "f", tok)
        if config.in_domain_target:
            self.in_domain["e"] = load_corpus(config.in_domain_target, "e", tok)

        model_f2e = tr.train_model1(self.parallel, config.em_iterations)
        reversed_parallel = type(self.parallel)(
            source=self.parallel.target, target=self.parallel.source
        )
        model_e2f = tr.train_model1(reversed_parallel, config.em_iterations)
        self.translators = {
            "f2e": tr.Model1Translator(
                model_f2e, "f2e", noise_rate=config.noise_rate, seed=config.seed
            ),
            "e2f": tr.Model1Translator(
                model_e2f, "e2f", noise_rate=config.noise_rate, seed=config.seed + 1
            ),
        }

        self.embedders = self._build_embedders()
        self.lm_gen: dict[str, object] = {}
        self.lm_in: dict[str, object] = {}
        self.tfidf: dict[str, scoring.TfIdfIndex] = {}
        if config.simp_metric == "lm_gen":
            self.lm_gen["f"] = train_lm(self.parallel.source, config.lm_order)
            self.lm_gen["e"] = train_lm(self.parallel.target, config.lm_order)
        if config.repr_metric == "lm_in":
            for lang in ("f", "e"):
                self.lm_in[lang] = train_lm(self.in_domain[lang], config.lm_order)
        if config.repr_metric == "tfidf":
            for lang in ("f", "e"):
                self.tfidf[lang] = scoring.TfIdfIndex(
                    self.mono[lang], self.in_domain[lang]
                )

    def _build_embedders(self):
        cfg = self.config
        if cfg.embedding_source_path and cfg.embedding_target_path:
            return {
                "f": tr.load_embedding_file(cfg.embedding_source_path),
                "e": tr.load_embedding_file(cfg.embedding_target_path),
            }
        token_map = {}
        if cfg.token_map_path:
            with open(cfg.token_map_path, encoding="utf-8") as f:
                for line in f:
                    parts = line.split()
                    if len(parts) == 2:
                        token_map[parts[0]] = parts[1]
        # shared vector space: one embedder, target tokens mapped onto their
        # source partners before hashing
        shared = tr.BagEmbedder(cfg.embed_dim, seed=cfg.seed, token_map=token_map)
        return {"f": shared, "e": shared}

    # language whose monolingual pool a direction selects from
    @staticmethod
    def pool_lang(direction: str) -> str:
        return "e" if direction == "f2e" else "f"

    def back_translator(self, direction: str):
        # f2e trains on (F', E) pairs, produced by translating E with M_EF
        return self.translators["e2f" if direction == "f2e" else "f2e"]

    def static_scores(self, direction: str) -> scoring.ScoreTable:
        cfg = self.config
        lang = self.pool_lang(direction)
        pool = self.mono[lang]

        if cfg.repr_metric == "tfidf":
            cos = self.tfidf[lang].max_cosines(pool)
            raw_repr = {s.id: float(cos[i]) for i, s in enumerate(pool)}
        elif cfg.repr_metric == "lm_in":
            lm = self.lm_in[lang]
            raw_repr = {s.id: scoring.repr_lm_in(lm, s) for s in pool}
        else:  # embed
            emb = self.embedders[lang]
            ref_vectors = [emb.embed(s) for s in self.in_domain[lang]]
            raw_repr = {
                s.id: scoring.repr_embed(s, emb, ref_vectors) for s in pool
            }

        if cfg.simp_metric == "lm_gen":
            lm = self.lm_gen[lang]
            raw_simp = {s.id: scoring.simp_lm_gen(lm, s) for s in pool}
        else:  # rbleu: pool -> other language -> back
            fwd = self.back_translator(direction)
            bwd = self.translators[direction]
            raw_simp = {
                s.id: scoring.simp_round_trip(s, fwd, bwd) for s in pool
            }

        return scoring.ScoreTable.build(
            cfg.repr_metric, cfg.simp_metric, raw_repr, raw_simp
        )

    def _pair_quality(self, direction: str, synthetic, genuine) -> float:
        cfg = self.config
        lang = self.pool_lang(direction)
        other = "f" if lang == "e" else "e"
        if cfg.weighting.quality_metric == "enc":
            return enc_weight(
                synthetic, genuine, self.embedders[other], self.embedders[lang]
            )
        # agree: synthetic is in the "other" language, genuine in pool language
        if direction == "f2e":  # x = synthetic F', y = genuine E
            return agree_weight(
                synthetic, genuine, self.translators["f2e"], self.translators["e2f"]
            )
        return agree_weight(
            genuine, synthetic, self.translators["f2e"], self.translators["e2f"]
        )

    def run_epoch(self, state: RunState) -> EpochReport:
        cfg = self.config
        t = state.t
        lam = lambda_at(t, cfg.schedule)
        rows = []
        reports: dict[str, DirectionReport] = {}
        for direction in DIRECTIONS:
            if direction not in state.score_tables:
                state.score_tables[direction] = self.static_scores(direction)
            table = state.score_tables[direction]
            combined = {
                sid: combined_score(table.norm_repr[sid], table.norm_simp[sid], lam)
                for sid in table.raw_repr
            }
            sel = select_top(combined, cfg.selection, epoch=t, lam=lam)

            lang = self.pool_lang(direction)
            pool = self.mono[lang]
            bt = self.back_translator(direction)
            store = state.stores[direction]
            pairs: list[WeightedPair] = []
            for sid in sel.selected:
                genuine = pool[sid]
                synthetic = bt.translate(genuine)
                quality = self._pair_quality(direction, synthetic, genuine)
                imp = imp_factor(quality, store.get(direction, sid), cfg.weighting)
                weight = final_weight(quality, imp, cfg.weighting)
                pairs.append(
                    WeightedPair(
                        source_tokens=list(synthetic),
                        target_tokens=list(genuine.tokens),
                        quality=quality,
                        imp=imp,
                        weight=weight,
                        epoch=t,
                        direction=direction,
                        sentence_id=sid,
                    )
                )
            # batched store update keeps read-then-update semantics race-free
            for pair in pairs:
                store.update(direction, pair.sentence_id, pair.quality)

            for pair in pairs:
                rows.append(
                    {
                        "id": pair.sentence_id,
                        "epoch": t,
                        "direction": direction,
                        "src_tokens": pair.source_tokens,
                        "tgt_tokens": pair.target_tokens,
                        "quality": pair.quality,
                        "imp": pair.imp,
                        "weight": pair.weight,
                        "repr": table.norm_repr[pair.sentence_id],
                        "simp": table.norm_simp[pair.sentence_id],
                        "combined": sel.scores[pair.sentence_id],
                    }
                )

            prev = state.history[direction][-1] if state.history[direction] else None
            state.history[direction].append(sel)
            replaced = None
            if prev is not None:
                replaced = len(sel.selected_set - prev.selected_set) / len(sel.selected)

            hell = None
            if lang in self.in_domain:
                sel_dist = unigram_dist(pool[sid].tokens for sid in sel.selected)
                ref_dist = unigram_dist(s.tokens for s in self.in_domain[lang])
                hell = hellinger(sel_dist, ref_dist)

            weights = [p.weight for p in pairs]
            reports[direction] = DirectionReport(
                selected=len(sel.selected),
                pairs=len(pairs),
                mean_repr=_mean(table.norm_repr[s] for s in sel.selected),
                mean_simp=_mean(table.norm_simp[s] for s in sel.selected),
                mean_weight=_mean(weights),
                min_weight=min(weights),
                max_weight=max(weights),
                replaced_frac=replaced,
                hellinger_to_ref=hell,
            )

        self._write_epoch_file(t, rows)
        state.t += 1
        return EpochReport(epoch=t, lam=lam, directions=reports)

    def _write_epoch_file(self, t: int, rows) -> None:
        path = os.path.join(self.config.output_dir, f"epoch_{t:03d}.jsonl")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            for row in rows:
                f.write(json.dumps(row, sort_keys=True) + "\n")
        os.replace(tmp, path)

    def run(self) -> list[EpochReport]:
        """Execute the configured number of epochs and write all run
        artifacts (config snapshot, epoch JSONL files, stores, reports,
        summary) into the output directory."""
        cfg = self.config
        if cfg.epochs > 0:
            os.makedirs(cfg.output_dir, exist_ok=True)
            _atomic_write(
                os.path.join(cfg.output_dir, "config.json"),
                json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n",
            )
        state = RunState()
        reports = []
        for _ in range(cfg.epochs):
            reports.append(self.run_epoch(state))

        if reports:
            self._write_reports(reports)
            self._write_summary(state)
            for direction in DIRECTIONS:
                state.stores[direction].save(
                    os.path.join(cfg.output_dir, f"store_{direction}.tsv"), direction
                )
        return reports

    def _write_reports(self, reports) -> None:
        header = (
            "epoch\tlambda\tdirection\tselected\tpairs\tmean_repr\tmean_simp"
            "\tmean_weight\tmin_weight\tmax_weight\treplaced_frac\thellinger\n"
        )
        lines = [header]
        for rep in reports:
            for direction in DIRECTIONS:
                d = rep.directions[direction]
                lines.append(
                    "\t".join(
                        [
                            str(rep.epoch),
                            repr(rep.lam),
                            direction,
                            str(d.selected),
                            str(d.pairs),
                            repr(d.mean_repr),
                            repr(d.mean_simp),
                            repr(d.mean_weight),
                            repr(d.min_weight),
                            repr(d.max_weight),
                            "" if d.replaced_frac is None else repr(d.replaced_frac),
                            "" if d.hellinger_to_ref is None else repr(d.hellinger_to_ref),
                        ]
                    )
                    + "\n"
                )
        _atomic_write(
            os.path.join(self.config.output_dir, "reports.tsv"), "".join(lines)
        )

    def _write_summary(self, state: RunState) -> None:
        lines = ["direction\tmetric\tepoch\tvalue\n"]
        for direction in DIRECTIONS:
            history = state.history[direction]
            n = len(self.mono[self.pool_lang(direction)])
            if len(history) >= 2:
                replaced, coverage = replacement_stats(history, n)
                for i, frac in enumerate(replaced, start=1):
                    lines.append(f"{direction}\treplaced\t{i}\t{frac!r}\n")
            else:
                coverage = len(history[0].selected_set) / n if history else 0.0
            lines.append(f"{direction}\tcoverage\t\t{coverage!r}\n")
        _atomic_write(
            os.path.join(self.config.output_dir, "summary.tsv"), "".join(lines)
        )


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
    os.replace(tmp, path)


def run(config: RunConfig) -> list[EpochReport]:
    return Pipeline(config).run()


def diag(run_dir: str) -> dict[str, list[dict]]:
    """Post-hoc diagnostics over a finished run directory.

    Returns, per direction, one row per epoch with the mean selected length,
    Hellinger distance between the selected unigram distribution and the
    in-domain reference, the replaced fraction, and cumulative coverage.
    """
    config_path = os.path.join(run_dir, "config.json")
    if not os.path.exists(config_path):
        raise DataError(f"{run_dir}: no config.json; not a run directory")
    config = RunConfig.from_json(config_path)
    tok = config.tokenizer
    mono = {
        "f": load_corpus(config.source_mono, "f", tok, dedup=config.dedup),
        "e": load_corpus(config.target_mono, "e", tok, dedup=config.dedup),
    }
    refs = {}
    if config.in_domain_source:
        refs["f"] = load_corpus(config.in_domain_source, "f", tok)
    if config.in_domain_target:
        refs["e"] = load_corpus(config.in_domain_target, "e", tok)

    selections: dict[str, list[tuple[int, list[int]]]] = {d: [] for d in DIRECTIONS}
    epoch_files = sorted(
        f for f in os.listdir(run_dir)
        if f.startswith("epoch_") and f.endswith(".jsonl")
    )
    if not epoch_files:
        raise DataError(f"{run_dir}: no epoch files")
    for fname in epoch_files:
        per_dir: dict[str, list[int]] = {d: [] for d in DIRECTIONS}
        epoch = None
        with open(os.path.join(run_dir, fname), encoding="utf-8") as f:
            for line in f:
                row = json.loads(line)
                epoch = row["epoch"]
                per_dir[row["direction"]].append(row["id"])
        for d in DIRECTIONS:
            selections[d].append((epoch, per_dir[d]))

    out: dict[str, list[dict]] = {}
    for direction in DIRECTIONS:
        lang = Pipeline.pool_lang(direction)
        pool = mono[lang]
        ref_dist = (
            unigram_dist(s.tokens for s in refs[lang]) if lang in refs else None
        )
        rows = []
        seen: set[int] = set()
        prev: set[int] | None = None
        for epoch, ids in selections[direction]:
            cur = set(ids)
            seen |= cur
            row = {
                "epoch": epoch,
                "mean_length": _mean(len(pool[i].tokens) for i in ids),
                "replaced_frac": (
                    None if prev is None else len(cur - prev) / len(cur)
                ),
                "coverage": len(seen) / len(pool),
            }
            if ref_dist is not None:
                sel_dist = unigram_dist(pool[i].tokens for i in ids)
                row["hellinger"] = hellinger(sel_dist, ref_dist)
            rows.append(row)
            prev = cur
        out[direction] = rows
    return out
