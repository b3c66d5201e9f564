"""Command-line interface.

Subcommands: run (full pipeline), score, select, weight, train-lm, diag.
Exit codes: 0 success, 1 config error, 2 data error, 3 provider failure.
"""

from __future__ import annotations

import argparse
import sys

from . import pipeline, scoring, translator as tr, weighting
from .corpus import TokenizerConfig, load_corpus, load_parallel_corpus
from .curriculum import ScheduleConfig, SelectionConfig, lambda_at, select_top, combined_score
from .errors import ConfigError, DataError, ProviderError
from .ngram_lm import SmoothingConfig, dump_arpa, train_lm


def _tokenizer_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lowercase", action="store_true", help="lowercase while tokenizing")
    p.add_argument(
        "--passthrough", action="store_true",
        help="treat input as pre-tokenized (split on single spaces)",
    )


def _tok_config(args) -> TokenizerConfig:
    return TokenizerConfig(
        mode="passthrough" if args.passthrough else "whitespace",
        lowercase=args.lowercase,
    )


def cmd_run(args) -> int:
    config = pipeline.RunConfig.from_json(args.config)
    reports = pipeline.run(config)
    for rep in reports:
        for direction, d in rep.directions.items():
            print(
                f"epoch {rep.epoch} lambda {rep.lam:.4f} {direction}: "
                f"{d.pairs} pairs, mean weight {d.mean_weight:.4f}"
            )
    return 0


def cmd_train_lm(args) -> int:
    corpus = load_corpus(args.input, "lm", _tok_config(args))
    lm = train_lm(corpus, args.order, SmoothingConfig())
    dump_arpa(lm, args.output)
    print(f"trained order-{args.order} LM on {len(corpus)} sentences -> {args.output}")
    return 0


def cmd_score(args) -> int:
    tok = _tok_config(args)
    corpus = load_corpus(args.corpus, "f", tok)

    if args.repr in ("tfidf", "lm_in", "embed") and not args.in_domain:
        raise ConfigError(f"--repr {args.repr} requires --in-domain")
    if args.simp == "lm_gen" and not args.parallel_source:
        raise ConfigError("--simp lm_gen requires --parallel-source")
    if args.simp == "rbleu" and not (args.parallel_source and args.parallel_target):
        raise ConfigError("--simp rbleu requires --parallel-source and --parallel-target")

    in_domain = load_corpus(args.in_domain, "f", tok) if args.in_domain else None
    if args.repr == "tfidf":
        index = scoring.TfIdfIndex(corpus, in_domain)
        cos = index.max_cosines(corpus)
        raw_repr = {s.id: float(cos[i]) for i, s in enumerate(corpus)}
    elif args.repr == "lm_in":
        lm_in = train_lm(in_domain, args.lm_order)
        raw_repr = {s.id: scoring.repr_lm_in(lm_in, s) for s in corpus}
    else:
        emb = tr.BagEmbedder(args.embed_dim, seed=args.seed)
        refs = [emb.embed(s) for s in in_domain]
        raw_repr = {s.id: scoring.repr_embed(s, emb, refs) for s in corpus}

    if args.simp == "lm_gen":
        par_src = load_corpus(args.parallel_source, "f", tok)
        lm_gen = train_lm(par_src, args.lm_order)
        raw_simp = {s.id: scoring.simp_lm_gen(lm_gen, s) for s in corpus}
    else:
        par = load_parallel_corpus(args.parallel_source, args.parallel_target, "f", "e", tok)
        fwd = tr.Model1Translator(tr.train_model1(par, args.em_iterations), "f2e")
        rev = type(par)(source=par.target, target=par.source)
        bwd = tr.Model1Translator(tr.train_model1(rev, args.em_iterations), "e2f")
        raw_simp = {s.id: scoring.simp_round_trip(s, fwd, bwd) for s in corpus}

    table = scoring.ScoreTable.build(args.repr, args.simp, raw_repr, raw_simp)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        out.write("id\traw_repr\traw_simp\tnorm_repr\tnorm_simp\trepr_metric\tsimp_metric\n")
        for sid in table.ids():
            out.write(
                f"{sid}\t{table.raw_repr[sid]!r}\t{table.raw_simp[sid]!r}"
                f"\t{table.norm_repr[sid]!r}\t{table.norm_simp[sid]!r}"
                f"\t{table.repr_metric}\t{table.simp_metric}\n"
            )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_select(args) -> int:
    schedule = ScheduleConfig(c0=args.c0, T=args.T)
    selection = SelectionConfig(p=args.p)
    lam = lambda_at(args.epoch, schedule)
    scores = {}
    with open(args.scores, encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        try:
            id_col = header.index("id")
            repr_col = header.index("norm_repr")
            simp_col = header.index("norm_simp")
        except ValueError as e:
            raise DataError(f"{args.scores}: missing score columns") from e
        for line in f:
            parts = line.rstrip("\n").split("\t")
            scores[int(parts[id_col])] = combined_score(
                float(parts[repr_col]), float(parts[simp_col]), lam
            )
    sel = select_top(scores, selection, epoch=args.epoch, lam=lam)
    print(f"# epoch {args.epoch} lambda {lam!r}")
    print("id\tcombined")
    for sid in sel.selected:
        print(f"{sid}\t{sel.scores[sid]!r}")
    return 0


def cmd_weight(args) -> int:
    tok = _tok_config(args)
    src = load_corpus(args.source, "f", tok)
    tgt = load_corpus(args.target, "e", tok)
    if len(src) != len(tgt):
        raise DataError("source and target files differ in length")
    token_map = {}
    if args.token_map:
        with open(args.token_map, encoding="utf-8") as f:
            for line in f:
                parts = line.split()
                if len(parts) == 2:
                    token_map[parts[0]] = parts[1]
    emb = tr.BagEmbedder(args.embed_dim, seed=args.seed, token_map=token_map)
    config = weighting.WeightConfig(
        quality_metric="enc",
        improvement=args.store is not None,
        w_low=args.w_low,
        w_high=args.w_high,
    )
    store = weighting.QualityStore()
    if args.store:
        try:
            store.load(args.store, args.direction)
        except FileNotFoundError:
            pass
    print("id\tquality\timp\tweight")
    for s, t in zip(src, tgt):
        quality = weighting.enc_weight(s, t, emb, emb)
        imp = weighting.imp_factor(quality, store.get(args.direction, s.id), config)
        w = weighting.final_weight(quality, imp, config)
        print(f"{s.id}\t{quality!r}\t{imp!r}\t{w!r}")
        store.update(args.direction, s.id, quality)
    if args.store:
        store.save(args.store, args.direction)
    return 0


def cmd_diag(args) -> int:
    tables = pipeline.diag(args.run_dir)
    print("direction\tepoch\tmean_length\thellinger\treplaced_frac\tcoverage")
    for direction, rows in tables.items():
        for row in rows:
            hell = row.get("hellinger")
            rep = row["replaced_frac"]
            print(
                f"{direction}\t{row['epoch']}\t{row['mean_length']!r}"
                f"\t{'' if hell is None else repr(hell)}"
                f"\t{'' if rep is None else repr(rep)}"
                f"\t{row['coverage']!r}"
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btcurator",
        description="Curriculum data selection and weighting for iterative back-translation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a full pipeline run")
    p.add_argument("--config", required=True, help="run config JSON")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("train-lm", help="train a Kneser-Ney LM and dump ARPA")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--output", required=True)
    _tokenizer_args(p)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("score", help="score a monolingual corpus (TSV to stdout)")
    p.add_argument("--corpus", required=True, help="monolingual corpus (parallel-source language)")
    p.add_argument("--repr", choices=pipeline.REPR_METRICS, default="tfidf")
    p.add_argument("--simp", choices=pipeline.SIMP_METRICS, default="lm_gen")
    p.add_argument("--in-domain", help="in-domain reference corpus, same language")
    p.add_argument("--parallel-source")
    p.add_argument("--parallel-target")
    p.add_argument("--lm-order", type=int, default=3)
    p.add_argument("--em-iterations", type=int, default=10)
    p.add_argument("--embed-dim", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="write TSV here instead of stdout")
    _tokenizer_args(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("select", help="top-p%% selection from a score TSV")
    p.add_argument("--scores", required=True, help="TSV from the score subcommand")
    p.add_argument("--c0", type=float, default=0.1)
    p.add_argument("--T", type=int, default=5)
    p.add_argument("--p", type=float, default=30.0)
    p.add_argument("--epoch", type=int, required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("weight", help="encoder-similarity weights for aligned pair files")
    p.add_argument("--source", required=True, help="synthetic source side, one sentence per line")
    p.add_argument("--target", required=True, help="genuine target side, line-aligned")
    p.add_argument("--direction", default="f2e")
    p.add_argument("--embed-dim", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--token-map", help="TSV mapping target tokens into the source space")
    p.add_argument("--store", help="quality store file; enables improvement factors")
    p.add_argument("--w-low", type=float, default=0.5)
    p.add_argument("--w-high", type=float, default=2.0)
    _tokenizer_args(p)
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser("diag", help="diagnostics tables for a finished run")
    p.add_argument("--run-dir", required=True)
    p.set_defaults(func=cmd_diag)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except ProviderError as e:
        print(f"provider error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
