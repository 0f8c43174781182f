"""Simulated user and experiment runner.

The simulated user corrects the leftmost character where the current
hypothesis disagrees with the target reference, one character per
interaction, until the hypothesis equals the reference. Each correction
validates everything to its left, so the validated prefix grows by at least
one character per round and every session ends within
len(reference) + 1 interactions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .corpus import Dataset, ExperimentConfig, Sample
from .decoder import Hypothesis, SearchConfig, beam_search, constrained_search
from .errors import UnknownSourceError, UnsupportedModalityError
from .metrics import (
    EffortCounts,
    EffortReport,
    InteractionTrace,
    KsmrConvention,
    bleu,
    character_ter,
    effort_counts,
    ksmr,
    meteor_lite,
)
from .scorers import Scorer
from .seqcore import END_OF_TEXT, FeedbackSignal, SourceContext, split_prefix


@dataclass(frozen=True)
class SimulationConfig:
    search: SearchConfig = SearchConfig()
    max_interactions: int | None = None  # None: 2 * reference character count
    reference_policy: str = "first"  # first | min-initial-character-ter
    ksmr: KsmrConvention = KsmrConvention()

    def __post_init__(self) -> None:
        if self.max_interactions is not None and self.max_interactions < 1:
            raise ValueError("interaction cap must be >= 1")
        if self.reference_policy not in ("first", "min-initial-character-ter"):
            raise ValueError(f"unknown reference policy {self.reference_policy!r}")

    @classmethod
    def from_experiment(cls, config: ExperimentConfig) -> "SimulationConfig":
        return cls(search=config.search, max_interactions=config.max_interactions,
                   reference_policy=config.reference_policy, ksmr=config.ksmr)


def leftmost_mismatch(hypothesis: str, reference: str) -> tuple[int, str] | None:
    """(position, corrected character) of the first disagreement, the append
    position when the hypothesis is a strict prefix of the reference, the
    end-of-text stop event when the reference is a strict prefix of the
    hypothesis, or None when they already agree."""
    if hypothesis == reference:
        return None
    for i, (have, want) in enumerate(zip(hypothesis, reference)):
        if have != want:
            return i, want
    if len(hypothesis) < len(reference):
        return len(hypothesis), reference[len(hypothesis)]
    return len(reference), END_OF_TEXT


def simulate_session(
    scorer: Scorer,
    source: SourceContext,
    reference: str,
    cfg: SimulationConfig = SimulationConfig(),
    initial_hypothesis: Hypothesis | None = None,
    clock=time.perf_counter,
) -> InteractionTrace:
    """Run one interactive session against a reference.

    Returns the trace: accepted with final_prediction == reference on
    convergence, flagged ``capped`` (and not accepted) when the interaction
    cap was hit first. Wall-clock latency of each constrained search lands in
    ``trace.latencies_ms``; pass a counter as ``clock`` for reproducible runs.
    """
    if not reference:
        raise ValueError("reference must be nonempty")
    cap = cfg.max_interactions if cfg.max_interactions is not None else max(1, 2 * len(reference))
    hypothesis = initial_hypothesis if initial_hypothesis is not None \
        else beam_search(scorer, source, cfg.search)
    trace = InteractionTrace()
    rendered = hypothesis.render()
    while True:
        step = leftmost_mismatch(rendered, reference)
        if step is None:
            trace.accept_with(reference)
            return trace
        if len(trace.events) >= cap:
            trace.capped = True
            trace.final_prediction = rendered
            return trace
        position, character = step
        trace.add_event(position, character)
        if character == END_OF_TEXT:
            # Stop keystroke: cut the hypothesis at the reference end.
            rendered = reference
            continue
        constraint = split_prefix(rendered, FeedbackSignal(position, character), scorer.vocab)
        started = clock()
        hypothesis = constrained_search(scorer, source, constraint, cfg.search)
        trace.latencies_ms.append((clock() - started) * 1000.0)
        rendered = hypothesis.render()


@dataclass(frozen=True)
class LatencyStats:
    count: int
    mean_ms: float
    p50_ms: float
    p90_ms: float
    p99_ms: float

    def __post_init__(self) -> None:
        if not self.p50_ms <= self.p90_ms <= self.p99_ms:
            raise ValueError("latency percentiles must be monotone")

    @classmethod
    def from_samples(cls, values: list[float]) -> "LatencyStats":
        if not values:
            return cls(0, 0.0, 0.0, 0.0, 0.0)
        arr = np.asarray(values)
        p50, p90, p99 = (float(np.percentile(arr, q)) for q in (50, 90, 99))
        return cls(len(values), float(arr.mean()), p50, p90, p99)

    def to_dict(self) -> dict:
        return {"count": self.count, "mean_ms": self.mean_ms, "p50_ms": self.p50_ms,
                "p90_ms": self.p90_ms, "p99_ms": self.p99_ms}


@dataclass(frozen=True)
class ExperimentReport:
    dataset: str
    modality: str
    samples: int
    static: EffortReport
    interactive: EffortReport
    capped_sessions: int
    latency: LatencyStats
    per_sample_ksmr: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "modality": self.modality,
            "samples": self.samples,
            "static": self.static.to_dict(),
            "interactive": self.interactive.to_dict(),
            "capped_sessions": self.capped_sessions,
            "latency_ms": self.latency.to_dict(),
        }


def _check_sources(dataset: Dataset, scorer: Scorer) -> None:
    bad: list[str] = []
    for sample in dataset.samples:
        try:
            scorer.init_state(sample.source)
        except (UnknownSourceError, UnsupportedModalityError):
            bad.append(sample.id)
    if bad:
        raise UnknownSourceError(
            f"scorer cannot handle {len(bad)} sample(s): {', '.join(bad[:20])}"
        )


def _pick_reference(sample: Sample, initial: str, policy: str) -> str:
    if policy == "first" or len(sample.references) == 1:
        return sample.references[0]
    return min(sample.references, key=lambda ref: (character_ter(initial, ref), ref))


def run_experiment(
    dataset: Dataset,
    scorer: Scorer,
    cfg: SimulationConfig = SimulationConfig(),
    clock=time.perf_counter,
) -> ExperimentReport:
    """Static pass (decode once, score BLEU / METEOR-lite / CharacTER) plus
    interactive pass (simulate corrections, aggregate KSMR over total counts).
    """
    if not dataset.samples:
        raise ValueError("dataset is empty")
    _check_sources(dataset, scorer)
    decodes = [beam_search(scorer, s.source, cfg.search) for s in dataset.samples]
    rendered = [h.render() for h in decodes]
    targets = [_pick_reference(s, r, cfg.reference_policy)
               for s, r in zip(dataset.samples, rendered)]
    static = EffortReport(
        bleu=bleu(rendered, [list(s.references) for s in dataset.samples]),
        meteor_lite=float(np.mean([meteor_lite(r, list(s.references))
                                   for r, s in zip(rendered, dataset.samples)])),
        character_ter=float(np.mean([character_ter(r, t) for r, t in zip(rendered, targets)])),
        counts=EffortCounts(samples=len(dataset.samples),
                            characters=sum(len(r) for r in rendered)),
    )
    keystrokes = mouse = characters = capped = 0
    latencies: list[float] = []
    per_sample: list[float] = []
    for sample, hypothesis, target in zip(dataset.samples, decodes, targets):
        trace = simulate_session(scorer, sample.source, target, cfg,
                                 initial_hypothesis=hypothesis, clock=clock)
        latencies.extend(trace.latencies_ms)
        if trace.capped:
            capped += 1
            continue
        k, m = effort_counts(trace, cfg.ksmr)
        keystrokes += k
        mouse += m
        characters += len(trace.final_prediction)
        per_sample.append(ksmr(trace, cfg.ksmr))
    converged = len(dataset.samples) - capped
    interactive = EffortReport(
        ksmr=100.0 * (keystrokes + mouse) / characters if characters else None,
        counts=EffortCounts(samples=converged, keystrokes=keystrokes,
                            mouse_actions=mouse, characters=characters),
    )
    return ExperimentReport(
        dataset=dataset.name,
        modality=dataset.modality,
        samples=len(dataset.samples),
        static=static,
        interactive=interactive,
        capped_sessions=capped,
        latency=LatencyStats.from_samples(latencies),
        per_sample_ksmr=tuple(per_sample),
    )
