"""Deterministic synthetic corpora for experiments and the acceptance suite."""

from __future__ import annotations

import numpy as np

from .corpus import Dataset, Sample
from .scorers import NBestScorer, NgramConditionalScorer, train_ngram
from .seqcore import SourceContext, Vocabulary, tokenize


def convergence_corpus(n_samples: int = 200, seed: int = 20240917):
    """Parallel word-mapped corpus plus an n-gram scorer trained on it.

    Target words walk a fixed ring, so continuations are near-deterministic
    and full-length decodes beat the immediate stop even on raw scores; the
    start word and sentence length stay ambiguous, which is what the
    corrections end up fixing. Sources mirror the target words token for
    token, making the lexical component genuinely informative.
    """
    rng = np.random.default_rng(seed)
    content = [f"c{i}" for i in range(20)]
    sources = [f"s{i}" for i in range(20)]
    vocab = Vocabulary.from_tokens(content + sources + ["."])
    samples = []
    pairs = []
    for index in range(n_samples):
        start = int(rng.integers(0, len(content)))
        length = int(rng.integers(4, 9))
        picks = [(start + k) % len(content) for k in range(length)]
        target = " ".join(content[p] for p in picks) + " ."
        source_text = " ".join(sources[p] for p in picks)
        source = SourceContext.from_text(tokenize(source_text, vocab), sample_id=str(index))
        samples.append(Sample(id=str(index), source=source, references=(target,)))
        pairs.append((tokenize(source_text, vocab), tokenize(target, vocab)))
    scorer = train_ngram(pairs, order=3, smoothing=0.02, lam=0.5,
                         interpolation_weights=(0.1, 0.3, 0.6))
    dataset = Dataset(name="synthetic-convergence", modality="text", samples=tuple(samples))
    return dataset, scorer


def informative_nbest_corpus(n_samples: int = 40, seed: int = 9041):
    """Five candidates per sample with the reference at rank 1..3 (cycling)
    and distractors that diverge from the reference early with distinct
    initial letters, so one keystroke usually pins the reference."""
    rng = np.random.default_rng(seed)
    stems = ["red", "blue", "green", "amber", "violet", "teal", "coral", "olive"]
    fillers = ["marker", "signal", "beacon", "lantern", "sign", "flag"]
    words = stems + fillers + ["the", "a", "near", "by", "over", "under", "."]
    vocab = Vocabulary.from_tokens(words)
    samples = []
    table = {}
    for index in range(n_samples):
        key = str(index)
        shared = ["the", str(rng.choice(fillers)), "near", "a"]
        options = list(rng.permutation(stems))[:4]
        reference = " ".join(shared + [options[0], str(rng.choice(fillers)), "."])
        rank = index % 3 + 1  # reference sits at rank 1, 2 or 3
        candidates = []
        slot = 0
        for position in range(5):
            if position == rank - 1:
                candidates.append((reference, -0.5 * (position + 1)))
                continue
            slot += 1
            alt = " ".join(shared + [options[slot % 4] if slot % 4 else options[1],
                                     str(rng.choice(fillers)), str(rng.choice(fillers)), "."])
            candidates.append((alt, -0.5 * (position + 1)))
        source = SourceContext.from_features([[float(index)]], sample_id=key)
        samples.append(Sample(id=key, source=source, references=(reference,)))
        table[key] = [(tokenize(text, vocab), logprob) for text, logprob in candidates]
    dataset = Dataset(name="synthetic-nbest", modality="image-features", samples=tuple(samples))
    return dataset, NBestScorer(vocab, table)


def latency_rig(n_words: int = 10_000, seed: int = 7, chain_span: int = 2000):
    """A 10k-word vocabulary and a chain-structured n-gram scorer whose
    decodes keep generating (continuations dominate end-of-sequence), the
    worst case for search latency."""
    rng = np.random.default_rng(seed)
    words = [f"tok{i:05d}" for i in range(n_words)]
    vocab = Vocabulary.from_tokens(words)
    pairs = []
    for _ in range(300):
        start = int(rng.integers(0, chain_span))
        length = int(rng.integers(30, 45))
        chain = [words[(start + k) % chain_span] for k in range(length)]
        source_text = " ".join(rng.choice(words[:chain_span], size=6))
        pairs.append((tokenize(source_text, vocab), tokenize(" ".join(chain), vocab)))
    scorer = train_ngram(pairs, order=3, smoothing=0.01, lam=0.2)
    sources = [SourceContext.from_text(src) for src, _ in pairs[:60]]
    return vocab, scorer, sources
