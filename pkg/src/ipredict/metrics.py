"""Prediction-quality and correction-effort metrics.

Quality: corpus BLEU-4 and an exact-match METEOR variant (``meteor_lite``,
no stemming or synonym resources). Effort: CharacTER (character edit rate,
the static post-editing proxy) and KSMR (keystrokes plus mouse actions per
final character, the interactive proxy). All rates live on a 0..100 scale.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field


# ---------------------------------------------------------------------------
# Character edit distance


def damerau_levenshtein(a: str, b: str) -> int:
    """Minimum edits (insert, delete, substitute, adjacent transpose) turning
    ``a`` into ``b``. Unrestricted distance: transposed characters may be
    edited again, matching exhaustive edit-script search."""
    if a == b:
        return 0
    m, n = len(a), len(b)
    if m == 0:
        return n
    if n == 0:
        return m
    big = m + n
    last_row: dict[str, int] = {}
    d = [[0] * (n + 2) for _ in range(m + 2)]
    d[0][0] = big
    for i in range(m + 1):
        d[i + 1][0] = big
        d[i + 1][1] = i
    for j in range(n + 1):
        d[0][j + 1] = big
        d[1][j + 1] = j
    for i in range(1, m + 1):
        last_col = 0
        for j in range(1, n + 1):
            k = last_row.get(b[j - 1], 0)
            l = last_col
            if a[i - 1] == b[j - 1]:
                cost = 0
                last_col = j
            else:
                cost = 1
            d[i + 1][j + 1] = min(
                d[i][j] + cost,
                d[i + 1][j] + 1,
                d[i][j + 1] + 1,
                d[k][l] + (i - k - 1) + 1 + (j - l - 1),
            )
        last_row[a[i - 1]] = i
    return d[m + 1][n + 1]


def character_ter(hypothesis: str, reference: str) -> float:
    """Character edit operations relative to the hypothesis length, times 100.
    An empty hypothesis scores 100 by convention; rates above 100 are possible
    when the hypothesis is much shorter than the reference."""
    if not reference:
        raise ValueError("reference must be nonempty")
    if not hypothesis:
        return 100.0
    return 100.0 * damerau_levenshtein(hypothesis, reference) / len(hypothesis)


# ---------------------------------------------------------------------------
# BLEU


def _ngrams(words: list[str], order: int) -> Counter:
    return Counter(tuple(words[i:i + order]) for i in range(len(words) - order + 1))


def bleu(hypotheses: list[str], references: list[list[str]], max_order: int = 4,
         smooth: bool = False) -> float:
    """Corpus BLEU with clipped counts up to ``max_order`` and the brevity
    penalty exp(1 - r/c) for short output, r taken from the closest-length
    reference per sample (ties to the shorter one).

    ``smooth`` adds one to numerator and denominator of orders above 1,
    useful on tiny corpora where an order would otherwise be empty.
    """
    if not hypotheses:
        raise ValueError("empty corpus")
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses vs {len(references)} reference sets")
    matched = [0] * max_order
    total = [0] * max_order
    hyp_length = 0
    ref_length = 0
    for hyp, refs in zip(hypotheses, references):
        if not refs:
            raise ValueError("every sample needs at least one reference")
        hyp_words = hyp.split()
        ref_word_lists = [r.split() for r in refs]
        hyp_length += len(hyp_words)
        ref_length += min((abs(len(r) - len(hyp_words)), len(r)) for r in ref_word_lists)[1]
        for order in range(1, max_order + 1):
            counts = _ngrams(hyp_words, order)
            if not counts:
                continue
            best = Counter()
            for ref_words in ref_word_lists:
                ref_counts = _ngrams(ref_words, order)
                for gram, count in ref_counts.items():
                    if count > best[gram]:
                        best[gram] = count
            matched[order - 1] += sum(min(count, best[gram]) for gram, count in counts.items())
            total[order - 1] += sum(counts.values())
    log_sum = 0.0
    for order in range(max_order):
        num, den = matched[order], total[order]
        if smooth and order > 0:
            num, den = num + 1, den + 1
        if num == 0 or den == 0:
            return 0.0
        log_sum += math.log(num / den)
    brevity = 1.0 if hyp_length >= ref_length or hyp_length == 0 else math.exp(1 - ref_length / hyp_length)
    return 100.0 * brevity * math.exp(log_sum / max_order)


# ---------------------------------------------------------------------------
# METEOR (exact-match variant)


def _min_chunks(hyp_words: list[str], ref_words: list[str], node_cap: int = 200_000) -> tuple[int, int]:
    """Matches and the fewest chunks over all maximal one-to-one exact-word
    alignments. Exhaustive with pruning; beyond ``node_cap`` explored nodes a
    greedy left-to-right alignment is used instead."""
    ref_slots: dict[str, list[int]] = defaultdict(list)
    for j, word in enumerate(ref_words):
        ref_slots[word].append(j)
    hyp_counts = Counter(hyp_words)
    budget = {w: min(c, len(ref_slots[w])) for w, c in hyp_counts.items() if w in ref_slots}
    matches = sum(budget.values())
    if matches == 0:
        return 0, 0
    suffix = [dict[str, int]() for _ in range(len(hyp_words) + 1)]
    running: Counter = Counter()
    for i in range(len(hyp_words) - 1, -1, -1):
        running[hyp_words[i]] += 1
        suffix[i] = dict(running)
    best = [matches]  # chunks never exceed matches
    nodes = [0]

    def dfs(i: int, used: set[int], left: dict[str, int], prev_i: int, prev_j: int, chunks: int) -> bool:
        if chunks >= best[0] or nodes[0] > node_cap:
            return nodes[0] > node_cap
        if sum(left.values()) == 0:
            best[0] = chunks
            return False
        if i == len(hyp_words):
            return False
        nodes[0] += 1
        word = hyp_words[i]
        capped = False
        if left.get(word, 0) > 0:
            slots = ref_slots[word]
            preferred = sorted(slots, key=lambda j: (j != prev_j + 1 or i != prev_i + 1, j))
            for j in preferred:
                if j in used:
                    continue
                extends = i == prev_i + 1 and j == prev_j + 1
                used.add(j)
                left[word] -= 1
                capped |= dfs(i + 1, used, left, i, j, chunks + (0 if extends else 1))
                left[word] += 1
                used.remove(j)
        # Skipping this occurrence is legal only if later occurrences can
        # still absorb the word's remaining budget.
        remaining = suffix[i + 1].get(word, 0) if i + 1 <= len(hyp_words) else 0
        if left.get(word, 0) <= remaining or word not in left:
            capped |= dfs(i + 1, used, left, prev_i, prev_j, chunks)
        return capped

    capped = dfs(0, set(), dict(budget), -2, -2, 0)
    if capped:
        return matches, _greedy_chunks(hyp_words, ref_slots, dict(budget))
    return matches, best[0]


def _greedy_chunks(hyp_words: list[str], ref_slots: dict[str, list[int]], budget: dict[str, int]) -> int:
    used: set[int] = set()
    chunks = 0
    prev = (-2, -2)
    for i, word in enumerate(hyp_words):
        if budget.get(word, 0) <= 0:
            continue
        candidates = [j for j in ref_slots[word] if j not in used]
        if not candidates:
            continue
        j = prev[1] + 1 if (i == prev[0] + 1 and prev[1] + 1 in candidates) else candidates[0]
        used.add(j)
        budget[word] -= 1
        if not (i == prev[0] + 1 and j == prev[1] + 1):
            chunks += 1
        prev = (i, j)
    return chunks


def meteor_lite(hypothesis: str, references: list[str]) -> float:
    """Best F-mean of exact unigram matches over the references, discounted by
    the fragmentation penalty 0.5 * (chunks / matches) ** 3."""
    if not references:
        raise ValueError("references must be nonempty")
    hyp_words = hypothesis.split()
    best = 0.0
    for reference in references:
        ref_words = reference.split()
        if not hyp_words or not ref_words:
            continue
        matches, chunks = _min_chunks(hyp_words, ref_words)
        if matches == 0:
            continue
        precision = matches / len(hyp_words)
        recall = matches / len(ref_words)
        fmean = 10.0 * precision * recall / (recall + 9.0 * precision)
        penalty = 0.5 * (chunks / matches) ** 3
        best = max(best, fmean * (1.0 - penalty))
    return 100.0 * best


# ---------------------------------------------------------------------------
# Interaction traces and KSMR


@dataclass(frozen=True)
class TraceEvent:
    position: int
    character: str
    contiguous: bool


@dataclass
class InteractionTrace:
    """Ordered correction events plus the outcome of a session."""

    events: list[TraceEvent] = field(default_factory=list)
    final_prediction: str | None = None
    accepted: bool = False
    capped: bool = False
    latencies_ms: list[float] = field(default_factory=list)

    def add_event(self, position: int, character: str) -> TraceEvent:
        contiguous = bool(self.events) and position == self.events[-1].position + 1
        event = TraceEvent(position, character, contiguous)
        self.events.append(event)
        return event

    def accept_with(self, final_prediction: str) -> None:
        if final_prediction is None:
            raise ValueError("accepting requires a final prediction")
        self.final_prediction = final_prediction
        self.accepted = True

    def to_dict(self) -> dict:
        return {
            "events": [
                {"position": e.position, "character": e.character, "contiguous": e.contiguous}
                for e in self.events
            ],
            "final_prediction": self.final_prediction,
            "accepted": self.accepted,
            "capped": self.capped,
        }


@dataclass(frozen=True)
class KsmrConvention:
    """One mouse action per non-contiguous correction; the final acceptance
    costs one more mouse action unless switched off."""

    count_acceptance: bool = True


def effort_counts(trace: InteractionTrace, convention: KsmrConvention = KsmrConvention()) -> tuple[int, int]:
    """(keystrokes, mouse actions) for a trace under the convention."""
    keystrokes = len(trace.events)
    mouse = sum(1 for e in trace.events if not e.contiguous)
    if convention.count_acceptance:
        mouse += 1
    return keystrokes, mouse


def ksmr(trace: InteractionTrace, convention: KsmrConvention = KsmrConvention()) -> float:
    """Keystrokes plus mouse actions per hundred characters of the final
    prediction."""
    if not trace.accepted:
        raise ValueError("KSMR is defined for accepted traces only")
    if not trace.final_prediction:
        raise ValueError("final prediction must be nonempty")
    keystrokes, mouse = effort_counts(trace, convention)
    return 100.0 * (keystrokes + mouse) / len(trace.final_prediction)


# ---------------------------------------------------------------------------
# Aggregated reports


@dataclass(frozen=True)
class EffortCounts:
    samples: int = 0
    keystrokes: int = 0
    mouse_actions: int = 0
    characters: int = 0

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "keystrokes": self.keystrokes,
            "mouse_actions": self.mouse_actions,
            "characters": self.characters,
        }


@dataclass(frozen=True)
class EffortReport:
    """Rates on the 0..100 scale; fields that do not apply to a pass are None.

    The error rates may exceed 100 in degenerate regimes: character_ter when
    the hypothesis is much shorter than its reference, ksmr when corrections
    plus mouse actions outnumber the final characters (an uninformative model
    forced through the protocol)."""

    bleu: float | None = None
    meteor_lite: float | None = None
    character_ter: float | None = None
    ksmr: float | None = None
    counts: EffortCounts = EffortCounts()

    def __post_init__(self) -> None:
        for name in ("bleu", "meteor_lite"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 100.0:
                raise ValueError(f"{name} must lie in [0, 100], got {value}")
        for name in ("character_ter", "ksmr"):
            value = getattr(self, name)
            if value is not None and value < 0.0:
                raise ValueError(f"{name} cannot be negative")

    def to_dict(self) -> dict:
        return {
            "bleu": self.bleu,
            "meteor_lite": self.meteor_lite,
            "character_ter": self.character_ter,
            "ksmr": self.ksmr,
            "counts": self.counts.to_dict(),
        }
