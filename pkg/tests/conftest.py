import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from btcurator.corpus import corpus_from_lines  # noqa: E402


def make_corpus(lines, language="x"):
    return corpus_from_lines(lines, language)
