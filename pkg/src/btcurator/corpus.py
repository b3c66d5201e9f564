"""Corpus ingestion: tokenization, sentence identity, dataset containers."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TokenizerConfig:
    mode: str = "whitespace"  # "whitespace" | "passthrough"
    lowercase: bool = False


def tokenize(raw: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Split a text line into tokens.

    "whitespace" splits on runs of Unicode whitespace (optionally lowercasing);
    "passthrough" assumes the line is already tokenized and splits on single
    spaces only, preserving token case. Empty output signals a blank line.
    """
    if config.mode == "passthrough":
        return [t for t in raw.split(" ") if t]
    text = raw.lower() if config.lowercase else raw
    return text.split()


@dataclass(frozen=True)
class Sentence:
    id: int
    tokens: tuple[str, ...]
    raw: str

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class Corpus:
    language: str
    sentences: list[Sentence] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i: int) -> Sentence:
        return self.sentences[i]

    def token_lists(self) -> list[list[str]]:
        return [list(s.tokens) for s in self.sentences]


@dataclass
class ParallelCorpus:
    source: list[Sentence]
    target: list[Sentence]

    def __post_init__(self):
        if len(self.source) != len(self.target):
            raise DataError(
                "parallel corpus sides differ in length: "
                f"{len(self.source)} vs {len(self.target)}"
            )

    def __len__(self) -> int:
        return len(self.source)

    def pairs(self):
        return zip(self.source, self.target)


def corpus_from_lines(
    lines,
    language: str,
    config: TokenizerConfig = TokenizerConfig(),
    dedup: bool = False,
    origin: str = "<memory>",
) -> Corpus:
    sentences = []
    blank = 0
    seen: set[str] = set()
    for line in lines:
        raw = line.rstrip("\n")
        tokens = tokenize(raw, config)
        if not tokens:
            blank += 1
            continue
        if dedup:
            if raw in seen:
                continue
            seen.add(raw)
        sentences.append(Sentence(id=len(sentences), tokens=tuple(tokens), raw=raw))
    if blank:
        logger.warning("%s: skipped %d blank line(s)", origin, blank)
    if not sentences:
        raise DataError(f"{origin}: zero usable lines")
    return Corpus(language=language, sentences=sentences)


def load_corpus(
    path: str,
    language: str,
    config: TokenizerConfig = TokenizerConfig(),
    dedup: bool = False,
) -> Corpus:
    """Load a one-sentence-per-line UTF-8 file into a Corpus.

    Blank lines are skipped with a counted warning; an exact-raw-match dedup
    pass can be enabled for crawled monolingual pools.
    """
    try:
        with open(path, encoding="utf-8") as f:
            return corpus_from_lines(f, language, config, dedup, origin=path)
    except OSError as e:
        raise DataError(f"cannot read corpus file {path}: {e}") from e


def load_parallel_corpus(
    source_path: str,
    target_path: str,
    source_language: str = "src",
    target_language: str = "tgt",
    config: TokenizerConfig = TokenizerConfig(),
) -> ParallelCorpus:
    """Load two line-aligned files as a parallel corpus.

    Blank lines are not allowed here: they would silently break the positional
    pairing, so any blank line is a data error.
    """
    sides = []
    for path, lang in ((source_path, source_language), (target_path, target_language)):
        try:
            with open(path, encoding="utf-8") as f:
                lines = [line.rstrip("\n") for line in f]
        except OSError as e:
            raise DataError(f"cannot read corpus file {path}: {e}") from e
        sentences = []
        for i, raw in enumerate(lines):
            tokens = tokenize(raw, config)
            if not tokens:
                raise DataError(f"{path}: blank line {i} in parallel corpus")
            sentences.append(Sentence(id=i, tokens=tuple(tokens), raw=raw))
        if not sentences:
            raise DataError(f"{path}: zero usable lines")
        sides.append(sentences)
    return ParallelCorpus(source=sides[0], target=sides[1])
