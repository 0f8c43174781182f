"""Bundled showcase: an image-captioning sample with a rigged candidate table.

The initial caption reads "ramp." where the target says "bench"; three
single-character corrections ('b', 'u', 'n') steer the engine to the full
target caption. Handy for the live UI and for regression tests of the whole
correction loop.
"""

from __future__ import annotations

import os

from .corpus import Dataset, Sample
from .scorers import NBestScorer, write_feature_matrix
from .seqcore import SourceContext, Vocabulary, save_vocabulary, tokenize

DEMO_ID = "demo"
DEMO_REFERENCE = "A group of people sit on a bench under an umbrella."

_WORDS = [
    "A", "group", "of", "people", "sit", "on", "a", "ramp.", "bench", ".",
    "under", "an", "building.", "umbrella.",
]

_CANDIDATES = [
    ("A group of people sit on a ramp.", -1.0),
    ("A group of people sit on a bench .", -2.0),
    ("A group of people sit on a bench under a building.", -3.0),
    ("A group of people sit on a bench under an umbrella.", -4.0),
]

_FEATURES = [[float(r * 8 + c) / 10.0 for c in range(8)] for r in range(4)]


def demo_vocabulary() -> Vocabulary:
    return Vocabulary.from_tokens(_WORDS)


def demo_scorer(vocab: Vocabulary | None = None) -> NBestScorer:
    vocab = vocab or demo_vocabulary()
    table = {DEMO_ID: [(tokenize(text, vocab), logprob) for text, logprob in _CANDIDATES]}
    return NBestScorer(vocab, table)


def demo_source() -> SourceContext:
    return SourceContext.from_features(_FEATURES, modality="image-features", sample_id=DEMO_ID)


def demo_dataset() -> Dataset:
    sample = Sample(id=DEMO_ID, source=demo_source(), references=(DEMO_REFERENCE,))
    return Dataset(name="demo", modality="image-features", samples=(sample,))


def write_demo_corpus(directory: str) -> None:
    """Materialize the demo as a corpus directory for the CLI and the server."""
    os.makedirs(directory, exist_ok=True)
    vocab = demo_vocabulary()
    save_vocabulary(vocab, os.path.join(directory, "vocab.txt"))
    with open(os.path.join(directory, "nbest.tsv"), "w", encoding="utf-8") as handle:
        for text, logprob in _CANDIDATES:
            handle.write(f"{DEMO_ID}\t{logprob}\t{text}\n")
    write_feature_matrix(_FEATURES, os.path.join(directory, f"{DEMO_ID}.mat"))
    with open(os.path.join(directory, "manifest.jsonl"), "w", encoding="utf-8") as handle:
        handle.write(
            '{"id": "%s", "features": "%s.mat", "refs": ["%s"]}\n'
            % (DEMO_ID, DEMO_ID, DEMO_REFERENCE)
        )
