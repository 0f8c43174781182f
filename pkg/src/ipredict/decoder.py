"""Beam search and prefix-constrained search.

Constrained search honors user feedback in three layers: the validated
complete tokens are force-decoded (scored but never searched), the first free
step is restricted to tokens whose surface extends the character fragment,
and the suffix is found by ordinary beam search.

Determinism: equal scores are broken by the generated id sequence (lower
token id first, then shorter sequence), which makes searches reproducible
and lets tiny instances be checked against exhaustive enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scorers import DecoderState, Scorer, advance
from .seqcore import PrefixConstraint, SourceContext, TokenSequence, Vocabulary, detokenize


@dataclass(frozen=True)
class SearchConfig:
    beam_size: int = 6
    max_length: int = 64
    length_normalization: str = "none"  # or "divide-by-length"

    def __post_init__(self) -> None:
        if self.beam_size < 1:
            raise ValueError("beam size must be >= 1")
        if self.max_length < 1:
            raise ValueError("max length must be >= 1")
        if self.length_normalization not in ("none", "divide-by-length"):
            raise ValueError(f"unknown length normalization {self.length_normalization!r}")


@dataclass(frozen=True)
class Hypothesis:
    seq: TokenSequence
    score: float
    terminated: bool

    def __post_init__(self) -> None:
        ends_with_eos = bool(self.seq.ids) and self.seq.ids[-1] == self.seq.vocab.eos_id
        if self.terminated != ends_with_eos:
            raise ValueError("terminated flag must match a trailing end-of-sequence token")

    def render(self) -> str:
        return detokenize(self.seq)


def vocab_mask(vocab: Vocabulary, fragment: str) -> set[int]:
    """Ids of all tokens whose surface starts with the fragment (the fragment
    itself included); end-of-sequence never qualifies."""
    if not fragment:
        raise ValueError("fragment must be nonempty")
    return {
        token_id
        for token_id, surface in enumerate(vocab.tokens)
        if token_id != vocab.eos_id and surface.startswith(fragment)
    }


def force_decode(scorer: Scorer, source: SourceContext, tokens: TokenSequence) -> DecoderState:
    """Consume a fixed token sequence through the model with no search; the
    state's score is the sum of each token's conditional log-probability."""
    state = scorer.init_state(source)
    for token_id in tokens.ids:
        state = advance(state, token_id)
    return state


def _normalized(score: float, length: int, cfg: SearchConfig) -> float:
    if cfg.length_normalization == "divide-by-length" and length > 0:
        return score / length
    return score


def _suffix_search(start: DecoderState, cfg: SearchConfig,
                   first_step_allowed: list[int] | None) -> tuple[tuple[int, ...], float]:
    """Beam search for the generated suffix after ``start``.

    Returns (generated ids ending with eos, total raw score). A terminated
    start yields an empty suffix. ``first_step_allowed`` restricts step one
    to the given ascending ids, none of which may be eos; that step cannot
    terminate.
    """
    vocab = start.scorer.vocab
    eos = vocab.eos_id
    if start.terminated:
        return (), start.cum_logprob
    non_eos = np.array([i for i in range(len(vocab)) if i != eos], dtype=np.int64)
    # (normalized score, gen ids incl eos, raw score) of the best finished
    # hypothesis; lower key wins: (-normalized, ids).
    best_final: tuple[tuple[float, tuple[int, ...]], float] | None = None
    # Beams are (raw score, generated ids, state), kept sorted by generated
    # ids so (row, column) order below is exactly the id tie order.
    beams: list[tuple[float, tuple[int, ...], DecoderState]] = [(start.cum_logprob, (), start)]
    for step in range(cfg.max_length):
        if not beams:
            break
        if step == 0 and first_step_allowed is not None:
            columns = np.asarray(first_step_allowed, dtype=np.int64)
            can_finish = False
        else:
            columns = non_eos
            can_finish = True
        matrix = np.empty((len(beams), len(vocab)))
        for row, (score, _, state) in enumerate(beams):
            matrix[row] = state.log_distribution()
            matrix[row] += score
        if can_finish:
            for row, (_, gen, _) in enumerate(beams):
                finished = gen + (eos,)
                key = (-_normalized(float(matrix[row, eos]), len(finished), cfg), finished)
                if best_final is None or key < best_final[0]:
                    best_final = (key, float(matrix[row, eos]))
        if columns.size == 0:
            break
        sub = matrix[:, columns]
        picks = _top_candidates(sub, cfg.beam_size)
        next_beams = []
        for row, col in picks:
            token_id = int(columns[col])
            score, gen, state = beams[row]
            next_beams.append((float(sub[row, col]), gen + (token_id,), advance(state, token_id)))
        next_beams.sort(key=lambda b: b[1])
        beams = next_beams
        if (cfg.length_normalization == "none" and best_final is not None and beams
                and -best_final[0][0] > max(score for score, _, _ in beams)):
            # Per-step increments are never positive, so no live beam can
            # strictly beat the finished score; ties cannot form either.
            beams = []
    if best_final is None and beams:
        # Nothing terminated within the step budget: close the best live
        # hypothesis with eos.
        for score, gen, state in beams:
            finished = gen + (eos,)
            total = float(score + state.log_distribution()[eos])
            key = (-_normalized(total, len(finished), cfg), finished)
            if best_final is None or key < best_final[0]:
                best_final = (key, total)
    if best_final is None:
        raise RuntimeError("search produced no hypothesis (empty vocabulary?)")
    (_, gen), score = best_final
    return gen, score


def _top_candidates(matrix: np.ndarray, beam_size: int) -> list[tuple[int, int]]:
    """Top ``beam_size`` (row, col) cells by score; exact ties broken by flat
    index, which is the deterministic id order by construction."""
    flat = matrix.ravel()
    count = min(beam_size, flat.size)
    if count == 0:
        return []
    width = matrix.shape[1]
    if flat.size <= max(64, 4 * beam_size):
        order = sorted(range(flat.size), key=lambda i: (-flat[i], i))[:count]
        return [(i // width, i % width) for i in order]
    boundary = np.partition(flat, flat.size - count)[flat.size - count]
    if np.isneginf(boundary):
        order = np.nonzero(flat > -np.inf)[0]
        chosen = sorted(order, key=lambda i: (-flat[i], i))[:count]
        missing = count - len(chosen)
        if missing:
            chosen.extend(int(i) for i in np.nonzero(np.isneginf(flat))[0][:missing])
    else:
        above = np.nonzero(flat > boundary)[0]
        tied = np.nonzero(flat == boundary)[0]
        chosen = sorted(above, key=lambda i: (-flat[i], i))
        chosen.extend(tied[: count - len(chosen)])
    return [(int(i) // width, int(i) % width) for i in chosen]


def _build_hypothesis(prefix: TokenSequence, gen: tuple[int, ...], score: float) -> Hypothesis:
    ids = prefix.ids + gen
    literals = prefix.literals + (None,) * len(gen)
    seq = TokenSequence(prefix.vocab, ids, literals)
    terminated = bool(ids) and ids[-1] == prefix.vocab.eos_id
    return Hypothesis(seq, score, terminated)


def constrained_search(scorer: Scorer, source: SourceContext, constraint: PrefixConstraint,
                       cfg: SearchConfig = SearchConfig()) -> Hypothesis:
    """Most likely hypothesis whose rendering starts with the constraint.

    Complete tokens are force-decoded; a nonempty fragment restricts the first
    searched step to tokens extending it. When no vocabulary token extends the
    fragment, the fragment is emitted verbatim as an unknown-literal token
    (scored as the unknown id) and the search continues unconstrained, so any
    feedback stays representable. A validated trailing separator forbids
    terminating before at least one more token.
    """
    vocab = scorer.vocab
    state = force_decode(scorer, source, constraint.complete_tokens)
    if state.terminated and (constraint.fragment or constraint.trailing_separator):
        raise ValueError("constraint continues past an end-of-sequence token")
    prefix = constraint.complete_tokens
    first_allowed: list[int] | None = None
    if constraint.fragment:
        mask = vocab_mask(vocab, constraint.fragment)
        if mask:
            first_allowed = sorted(mask)
        else:
            if vocab.unk_id is None:
                raise ValueError(
                    "fragment matches no token and the vocabulary has no unknown id"
                )
            state = advance(state, vocab.unk_id)
            prefix = prefix.append(vocab.unk_id, constraint.fragment)
    elif constraint.trailing_separator:
        first_allowed = [i for i in range(len(vocab)) if i != vocab.eos_id]
    gen, score = _suffix_search(state, cfg, first_allowed)
    return _build_hypothesis(prefix, gen, score)


def beam_search(scorer: Scorer, source: SourceContext,
                cfg: SearchConfig = SearchConfig()) -> Hypothesis:
    """Unconstrained search: the best end-of-sequence-terminated hypothesis
    found within ``max_length`` steps, or the best live one closed with
    end-of-sequence when none terminates."""
    return constrained_search(scorer, source, PrefixConstraint.make_empty(scorer.vocab), cfg)
