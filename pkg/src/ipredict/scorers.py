"""Conditional sequence models behind a uniform state/distribution interface.

A scorer turns a source context into an initial :class:`DecoderState` and
provides, for any state, a log-probability vector over the whole vocabulary.
States are advanced token by token; the cumulative log-probability is the sum
of the per-step entries. Two desk-scale reference models are provided:

* :class:`NgramConditionalScorer` mixes an interpolated additively-smoothed
  target n-gram model with a lexical source-to-target co-occurrence table.
* :class:`NBestScorer` scores continuations by the weight of precomputed
  candidate outputs compatible with the consumed prefix, with a tiny uniform
  backoff so no distribution is ever all minus-infinity.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import CorpusFormatError, TerminatedStateError, UnknownSourceError, UnsupportedModalityError
from .seqcore import SourceContext, TokenSequence, Vocabulary, detokenize


class DecoderState:
    """Immutable decoding position: consumed target prefix plus its score.

    ``context`` is scorer-private (whatever the scorer precomputed from the
    source). The next-token distribution is computed lazily and cached; the
    cached array is read-only and shared with all children advanced from it.
    """

    __slots__ = ("scorer", "context", "history", "cum_logprob", "_dist")

    def __init__(self, scorer: "Scorer", context, history: tuple[int, ...], cum_logprob: float):
        self.scorer = scorer
        self.context = context
        self.history = history
        self.cum_logprob = cum_logprob
        self._dist: np.ndarray | None = None

    @property
    def terminated(self) -> bool:
        return bool(self.history) and self.history[-1] == self.scorer.vocab.eos_id

    def log_distribution(self) -> np.ndarray:
        """Log-probabilities over the vocabulary for the next token."""
        if self.terminated:
            raise TerminatedStateError("state already emitted end-of-sequence")
        if self._dist is None:
            dist = self.scorer._log_distribution(self.context, self.history)
            dist.setflags(write=False)
            self._dist = dist
        return self._dist


class Scorer(ABC):
    """The conditional model p(next token | source, target prefix)."""

    vocab: Vocabulary

    @abstractmethod
    def _context(self, source: SourceContext):
        """Precompute whatever the distributions need from the source."""

    @abstractmethod
    def _log_distribution(self, context, history: tuple[int, ...]) -> np.ndarray:
        """Return a fresh log-probability vector of length ``len(vocab)``."""

    def init_state(self, source: SourceContext) -> DecoderState:
        return DecoderState(self, self._context(source), (), 0.0)


def next_distribution(state: DecoderState) -> np.ndarray:
    return state.log_distribution()


def advance(state: DecoderState, token_id: int) -> DecoderState:
    """Consume one token; the new cumulative score adds exactly the token's
    entry in the old state's distribution."""
    if not 0 <= token_id < len(state.scorer.vocab):
        raise ValueError(f"token id {token_id} out of range")
    step = float(state.log_distribution()[token_id])
    return DecoderState(state.scorer, state.context, state.history + (token_id,),
                        state.cum_logprob + step)


class UniformScorer(Scorer):
    """Every token equally likely regardless of source or history."""

    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab

    def _context(self, source: SourceContext):
        return None

    def _log_distribution(self, context, history):
        return np.full(len(self.vocab), -np.log(len(self.vocab)))


class NgramConditionalScorer(Scorer):
    """Interpolated n-gram target model mixed with a lexical source model.

    p(t | source, history) = lam * lexical(t | source tokens)
                           + (1 - lam) * sum_k w_k * p_k(t | last k-1 tokens)

    where each p_k is additively smoothed. Histories shorter than k-1 are
    padded with begin-of-sequence. Text sources only.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        order: int,
        ngram_counts: list[dict[tuple[int, ...], Counter]],
        lexical_counts: dict[int, Counter],
        smoothing: float,
        lam: float,
        interpolation_weights: tuple[float, ...] | None = None,
    ):
        if order < 1:
            raise ValueError("order must be >= 1")
        if smoothing <= 0:
            raise ValueError("smoothing must be positive")
        if not 0.0 <= lam <= 1.0:
            raise ValueError("mixing weight must lie in [0, 1]")
        if len(ngram_counts) != order:
            raise ValueError("need one count table per order")
        self.vocab = vocab
        self.order = order
        self.smoothing = smoothing
        self.lam = lam
        if interpolation_weights is None:
            interpolation_weights = (1.0 / order,) * order
        if len(interpolation_weights) != order or abs(sum(interpolation_weights) - 1.0) > 1e-9:
            raise ValueError("interpolation weights must be one normalized value per order")
        self.interpolation_weights = interpolation_weights
        # Per order k (0-based index k-1): context tuple -> Counter of next ids,
        # densified to (ids array, counts array, total) for fast smoothing.
        self._tables: list[dict[tuple[int, ...], tuple[np.ndarray, np.ndarray, float]]] = []
        for by_context in ngram_counts:
            dense = {}
            for context, counter in by_context.items():
                ids = np.fromiter(counter.keys(), dtype=np.int64, count=len(counter))
                values = np.fromiter(counter.values(), dtype=np.float64, count=len(counter))
                dense[context] = (ids, values, float(values.sum()))
            self._tables.append(dense)
        self._lexical = {
            src: (np.fromiter(c.keys(), dtype=np.int64, count=len(c)),
                  np.fromiter(c.values(), dtype=np.float64, count=len(c)))
            for src, c in lexical_counts.items()
        }

    def _context(self, source: SourceContext):
        if source.modality != "text" or source.text is None:
            raise UnsupportedModalityError(
                f"n-gram scorer conditions on text sources, got {source.modality}"
            )
        size = len(self.vocab)
        alpha = self.smoothing
        accum = np.zeros(size)
        total = 0.0
        for token_id in dict.fromkeys(source.text.ids):
            entry = self._lexical.get(token_id)
            if entry is not None:
                ids, values = entry
                accum[ids] += values
                total += float(values.sum())
        lexical = (accum + alpha) / (total + alpha * size)
        return lexical

    def _log_distribution(self, context, history):
        size = len(self.vocab)
        alpha = self.smoothing
        probs = np.zeros(size)
        bos = self.vocab.bos_id
        for k in range(1, self.order + 1):
            ctx = history[-(k - 1):] if k > 1 else ()
            if k > 1 and len(ctx) < k - 1:
                if bos is None:
                    continue
                ctx = (bos,) * (k - 1 - len(ctx)) + ctx
            entry = self._tables[k - 1].get(ctx)
            component = np.full(size, alpha)
            total = alpha * size
            if entry is not None:
                ids, values, subtotal = entry
                component[ids] += values
                total += subtotal
            probs += self.interpolation_weights[k - 1] * (component / total)
        mixed = self.lam * context + (1.0 - self.lam) * probs
        mixed /= mixed.sum()
        return np.log(mixed)


def train_ngram(
    corpus: list[tuple[TokenSequence, TokenSequence]],
    order: int = 3,
    smoothing: float = 0.1,
    lam: float = 0.3,
    interpolation_weights: tuple[float, ...] | None = None,
) -> NgramConditionalScorer:
    """Count target n-grams (orders 1..order) and source-target co-occurrences.

    Every target sequence is counted with end-of-sequence appended so trained
    models know where outputs stop; initial contexts are padded with
    begin-of-sequence.
    """
    if not corpus:
        raise ValueError("training corpus is empty")
    vocab = corpus[0][1].vocab
    eos = vocab.eos_id
    bos = vocab.bos_id
    ngram_counts: list[dict[tuple[int, ...], Counter]] = [defaultdict(Counter) for _ in range(order)]
    lexical_counts: dict[int, Counter] = defaultdict(Counter)
    for source, target in corpus:
        events = target.ids + (eos,)
        padded = ((bos,) * (order - 1) + events) if bos is not None else events
        offset = len(padded) - len(events)
        for i, token in enumerate(events):
            position = offset + i
            for k in range(1, order + 1):
                start = position - (k - 1)
                if start < 0:
                    continue
                context = padded[start:position]
                ngram_counts[k - 1][context][token] += 1
        for src_token in set(source.ids):
            for trg_token in target.ids:
                lexical_counts[src_token][trg_token] += 1
    return NgramConditionalScorer(
        vocab, order, [dict(t) for t in ngram_counts], dict(lexical_counts),
        smoothing, lam, interpolation_weights,
    )


class NBestScorer(Scorer):
    """Deterministic model backed by ranked candidate outputs per source.

    Each candidate is its token ids plus end-of-sequence, weighted by
    exp(log-probability). The next-token distribution given a consumed prefix
    is the weight of candidates continuing with each token, plus a uniform
    additive backoff ``epsilon`` (renormalized) for off-list continuations.
    """

    def __init__(self, vocab: Vocabulary, table: dict[str, list[tuple[TokenSequence, float]]],
                 epsilon: float = 1e-9):
        if epsilon <= 0:
            raise ValueError("backoff mass must be positive")
        self.vocab = vocab
        self.epsilon = epsilon
        self._table: dict[str, list[tuple[tuple[int, ...], float]]] = {}
        for key, candidates in table.items():
            if not candidates:
                raise ValueError(f"empty candidate list for source {key!r}")
            packed = []
            for seq, logprob in candidates:
                if not np.isfinite(logprob):
                    raise ValueError(f"non-finite candidate log-probability for source {key!r}")
                packed.append((seq.ids + (vocab.eos_id,), float(logprob)))
            self._table[key] = packed

    @classmethod
    def from_file(cls, path: str, vocab: Vocabulary, epsilon: float = 1e-9) -> "NBestScorer":
        """Load `source_id<TAB>logprob<TAB>candidate text` records."""
        from .seqcore import tokenize

        table: dict[str, list[tuple[TokenSequence, float]]] = defaultdict(list)
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise CorpusFormatError(f"{path}:{lineno}: expected 3 tab-separated fields")
                source_id, logprob, text = parts
                try:
                    score = float(logprob)
                except ValueError as exc:
                    raise CorpusFormatError(f"{path}:{lineno}: bad log-probability {logprob!r}") from exc
                table[source_id].append((tokenize(text, vocab), score))
        return cls(vocab, dict(table), epsilon)

    def _context(self, source: SourceContext):
        key = source.key()
        if key is None or key not in self._table:
            raise UnknownSourceError(f"source {key!r} not in the candidate table")
        return self._table[key]

    def _log_distribution(self, context, history):
        size = len(self.vocab)
        mass = np.zeros(size)
        depth = len(history)
        for ids, logprob in context:
            if len(ids) > depth and ids[:depth] == history:
                mass[ids[depth]] += np.exp(logprob)
        probs = (mass + self.epsilon) / (mass.sum() + self.epsilon * size)
        return np.log(probs)


def read_feature_matrix(path: str) -> list[list[float]]:
    """Read the `rows cols` header then row-major whitespace-separated values."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    fields = text.split()
    if len(fields) < 2:
        raise CorpusFormatError(f"{path}: missing 'rows cols' header")
    try:
        rows, cols = int(fields[0]), int(fields[1])
    except ValueError as exc:
        raise CorpusFormatError(f"{path}: bad header {fields[:2]!r}") from exc
    values = fields[2:]
    if len(values) != rows * cols:
        raise CorpusFormatError(
            f"{path}: expected {rows * cols} values for {rows}x{cols}, found {len(values)}"
        )
    try:
        flat = [float(v) for v in values]
    except ValueError as exc:
        raise CorpusFormatError(f"{path}: non-numeric feature value") from exc
    return [flat[r * cols:(r + 1) * cols] for r in range(rows)]


def write_feature_matrix(rows: list[list[float]] | tuple, path: str) -> None:
    """Write a matrix in the declared format; values at 9 significant digits."""
    height = len(rows)
    width = len(rows[0]) if height else 0
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{height} {width}\n")
        for row in rows:
            handle.write(" ".join(format(float(v), ".9g") for v in row) + "\n")
