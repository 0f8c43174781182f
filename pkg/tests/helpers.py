"""Shared test machinery: deterministic random scorers, synthetic corpora,
and the exhaustive-search oracles the implementations are checked against."""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np

from ipredict.decoder import SearchConfig
from ipredict.scorers import Scorer
from ipredict.seqcore import SourceContext, TokenSequence, Vocabulary, tokenize


class SeededScorer(Scorer):
    """Deterministic pseudo-random distributions: same seed, source and
    history always give the same vector. Supports every modality."""

    def __init__(self, vocab: Vocabulary, seed: int):
        self.vocab = vocab
        self.seed = seed

    def _context(self, source):
        return None

    def _log_distribution(self, context, history):
        rng = np.random.default_rng([self.seed, 977, *history])
        probs = rng.random(len(self.vocab)) + 1e-3
        probs /= probs.sum()
        return np.log(probs)


def small_vocab(n_words: int, prefix: str = "w") -> Vocabulary:
    return Vocabulary.from_tokens([f"{prefix}{i}" for i in range(n_words)])


def text_source(text: str, vocab: Vocabulary) -> SourceContext:
    return SourceContext.from_text(tokenize(text, vocab))


def brute_force_best(scorer: Scorer, source: SourceContext, cfg: SearchConfig):
    """Exhaustive reference for beam_search: enumerate every token path of
    length max_length over the full vocabulary, truncate at the first eos,
    and apply the same preference rule (finished beats unfinished, then
    score, then lower ids, then shorter)."""
    from ipredict.scorers import advance

    eos = scorer.vocab.eos_id
    state_cache = {(): scorer.init_state(source)}

    def state_of(history: tuple[int, ...]):
        if history not in state_cache:
            state_cache[history] = advance(state_of(history[:-1]), history[-1])
        return state_cache[history]

    def score_of(history: tuple[int, ...]) -> float:
        return state_of(history).cum_logprob

    finished: dict[tuple[int, ...], float] = {}
    unfinished: dict[tuple[int, ...], float] = {}
    for path in itertools.product(range(len(scorer.vocab)), repeat=cfg.max_length):
        trimmed: list[int] = []
        for token in path:
            trimmed.append(token)
            if token == eos:
                break
        key = tuple(trimmed)
        if key[-1] == eos:
            finished.setdefault(key, score_of(key))
        else:
            unfinished.setdefault(key + (eos,), score_of(key + (eos,)))
    pool = finished if finished else unfinished

    def normalized(item):
        ids, score = item
        if cfg.length_normalization == "divide-by-length":
            return score / len(ids)
        return score

    best = min(pool.items(), key=lambda item: (-normalized(item), item[0]))
    return best  # (ids including eos, raw score)


def edit_script_distance(a: str, b: str, alphabet: str) -> int:
    """Breadth-first search over single edit operations (insert, delete,
    substitute, transpose adjacent); the reference for damerau_levenshtein."""
    return edit_script_distances(a, [b], alphabet)[b]


def edit_script_distances(a: str, targets: list[str], alphabet: str) -> dict[str, int]:
    """One breadth-first search from ``a`` over single edit operations,
    collecting the minimal script length to every target."""
    wanted = set(targets)
    found: dict[str, int] = {}
    if a in wanted:
        found[a] = 0
    limit = max(len(t) for t in wanted) + 4
    seen = {a}
    frontier = deque([(a, 0)])
    while frontier and len(found) < len(wanted):
        current, depth = frontier.popleft()
        for candidate in _neighbors(current, alphabet):
            if candidate in seen or len(candidate) > limit:
                continue
            seen.add(candidate)
            if candidate in wanted and candidate not in found:
                found[candidate] = depth + 1
            frontier.append((candidate, depth + 1))
    return found


def _neighbors(s: str, alphabet: str):
    for i in range(len(s) + 1):
        for c in alphabet:
            yield s[:i] + c + s[i:]
    for i in range(len(s)):
        yield s[:i] + s[i + 1:]
        for c in alphabet:
            if c != s[i]:
                yield s[:i] + c + s[i + 1:]
    for i in range(len(s) - 1):
        if s[i] != s[i + 1]:
            yield s[:i] + s[i + 1] + s[i] + s[i + 2:]
