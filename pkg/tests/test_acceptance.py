"""Acceptance suite: runs each release criterion at its stated tolerance and
prints one PASS line per criterion (visible with `pytest -s` or `-rP`).

Criteria:
  1. prefix compliance on 1000 randomized constrained searches, zero violations
  2. beam search equals exhaustive enumeration on all tiny instances
  3. simulated sessions converge within len(reference)+1 interactions,
     keystrokes bounded by the reference length, on a 200-sample corpus
  4. with an informative candidate model, interactive keystrokes cost at most
     half the static character edit operations
  5. the bundled showcase session reproduces corrections 'b','u','n' exactly
  6. metric implementations match their independent oracles within 0.05
  7. p99 constrained-search latency under 200 ms at a 10k vocabulary
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from helpers import (
    SeededScorer,
    brute_force_best,
    edit_script_distances,
    small_vocab,
    text_source,
)
from ipredict.synthetic import convergence_corpus, informative_nbest_corpus, latency_rig

from ipredict.decoder import SearchConfig, beam_search, constrained_search
from ipredict.demo import DEMO_REFERENCE, demo_dataset, demo_scorer, demo_source
from ipredict.metrics import (
    InteractionTrace,
    bleu,
    character_ter,
    damerau_levenshtein,
    ksmr,
    meteor_lite,
)
from ipredict.scorers import NBestScorer, train_ngram
from ipredict.seqcore import FeedbackSignal, SourceContext, Vocabulary, split_prefix, tokenize
from ipredict.simulator import run_experiment, simulate_session

TOLERANCE = 0.05


def _random_scorer(rng, vocab):
    kind = rng.integers(0, 3)
    if kind == 0:
        return SeededScorer(vocab, int(rng.integers(0, 2 ** 31)))
    words = [t for i, t in enumerate(vocab.tokens)
             if i not in (vocab.eos_id, vocab.bos_id, vocab.unk_id)]
    if kind == 1:
        pairs = []
        for _ in range(int(rng.integers(2, 6))):
            src = " ".join(rng.choice(words, size=int(rng.integers(1, 4))))
            trg = " ".join(rng.choice(words, size=int(rng.integers(1, 6))))
            pairs.append((tokenize(src, vocab), tokenize(trg, vocab)))
        return train_ngram(pairs, order=int(rng.integers(1, 4)),
                           smoothing=float(rng.uniform(0.01, 0.5)),
                           lam=float(rng.uniform(0.0, 1.0)))
    table = {}
    for key in ("k0", "k1"):
        table[key] = [
            (tokenize(" ".join(rng.choice(words, size=int(rng.integers(1, 5)))), vocab),
             float(-rng.uniform(0.1, 4.0)))
            for _ in range(int(rng.integers(1, 4)))
        ]
    return NBestScorer(vocab, table)


def _source_for(scorer, rng, vocab):
    if isinstance(scorer, NBestScorer):
        return SourceContext.from_features([[0.0]], sample_id=f"k{int(rng.integers(0, 2))}")
    words = [t for i, t in enumerate(vocab.tokens)
             if i not in (vocab.eos_id, vocab.bos_id, vocab.unk_id)]
    text = " ".join(rng.choice(words, size=int(rng.integers(1, 4))))
    return text_source(text, vocab)


def test_criterion_prefix_compliance():
    rng = np.random.default_rng(1234)
    cfg = SearchConfig(beam_size=4, max_length=10)
    trials = violations = 0
    started = time.perf_counter()
    while trials < 1000:
        vocab = small_vocab(int(rng.integers(1, 8)))
        scorer = _random_scorer(rng, vocab)
        source = _source_for(scorer, rng, vocab)
        rendered = beam_search(scorer, source, cfg).render()
        position = int(rng.integers(0, len(rendered) + 1))
        character = str(rng.choice(list("wz03 x")))
        constraint = split_prefix(rendered, FeedbackSignal(position, character), vocab)
        result = constrained_search(scorer, source, constraint, cfg)
        if not result.render().startswith(constraint.render()):
            violations += 1
        trials += 1
    elapsed = time.perf_counter() - started
    assert violations == 0
    assert elapsed < 60.0
    print(f"\nPASS prefix compliance: {trials} trials, {violations} violations, {elapsed:.1f}s")


def test_criterion_exhaustive_equivalence():
    rng = np.random.default_rng(99)
    checked = 0
    started = time.perf_counter()
    for n_plain in (0, 1, 2):  # 3..5 tokens including the specials
        for max_length in (1, 2, 3, 4):
            for _ in range(3):
                vocab = small_vocab(n_plain)
                assert len(vocab) <= 5
                scorer = SeededScorer(vocab, int(rng.integers(0, 2 ** 31)))
                source = text_source("</s>" if n_plain == 0 else "w0", vocab)
                cfg = SearchConfig(beam_size=len(vocab) ** max_length, max_length=max_length)
                expected_ids, expected_score = brute_force_best(scorer, source, cfg)
                result = beam_search(scorer, source, cfg)
                assert result.seq.ids == expected_ids, (n_plain, max_length)
                assert result.score == pytest.approx(expected_score, abs=1e-9)
                checked += 1
    elapsed = time.perf_counter() - started
    assert checked >= 20
    assert elapsed < 60.0
    print(f"\nPASS exhaustive equivalence: {checked} instances, {elapsed:.1f}s")


def test_criterion_simulation_convergence_and_bound():
    dataset, scorer = convergence_corpus(n_samples=200)
    converged = 0
    for sample in dataset.samples:
        reference = sample.references[0]
        trace = simulate_session(scorer, sample.source, reference)
        assert trace.accepted, f"sample {sample.id} did not converge"
        assert trace.final_prediction == reference
        interactions = len(trace.events)
        assert interactions <= len(reference) + 1, f"sample {sample.id}: {interactions}"
        keystrokes = len(trace.events)
        assert keystrokes <= len(reference), f"sample {sample.id}: {keystrokes} keystrokes"
        converged += 1
    assert converged == len(dataset.samples) == 200
    print(f"\nPASS simulation convergence: {converged}/200 sessions, bounds held")


def test_criterion_effort_halving():
    dataset, scorer = informative_nbest_corpus(n_samples=40)
    total_keystrokes = 0
    total_edit_ops = 0
    for sample in dataset.samples:
        reference = sample.references[0]
        initial = beam_search(scorer, sample.source).render()
        total_edit_ops += damerau_levenshtein(initial, reference)
        trace = simulate_session(scorer, sample.source, reference)
        assert trace.accepted
        total_keystrokes += len(trace.events)
    assert total_keystrokes <= 0.5 * total_edit_ops, (total_keystrokes, total_edit_ops)
    print(f"\nPASS effort halving: {total_keystrokes} keystrokes vs "
          f"{total_edit_ops} static edit operations "
          f"({100.0 * total_keystrokes / total_edit_ops:.1f}%)")


def test_criterion_session_regression():
    scorer = demo_scorer()
    source = demo_source()
    initial = beam_search(scorer, source).render()
    assert initial == "A group of people sit on a ramp."
    trace = simulate_session(scorer, source, DEMO_REFERENCE)
    assert [e.character for e in trace.events] == ["b", "u", "n"]
    assert trace.final_prediction == DEMO_REFERENCE
    assert trace.accepted and len(trace.events) == 3
    # static post-editing of the same pair: deleting the wrong tail and
    # typing the right one is 27 operations, so the optimal script is at most that
    static_ops = damerau_levenshtein(initial, DEMO_REFERENCE)
    assert static_ops <= 27
    report = run_experiment(demo_dataset(), scorer)
    assert report.interactive.ksmr == pytest.approx(100.0 * 7 / 51, abs=TOLERANCE)
    print(f"\nPASS session regression: corrections b,u,n; static ops {static_ops} <= 27; "
          f"KSMR {report.interactive.ksmr:.2f}")


def test_criterion_metric_oracles():
    # BLEU
    assert bleu(["the cat sat down"], [["the cat sat down"]]) == pytest.approx(100.0, abs=TOLERANCE)
    assert bleu(["the the the the"], [["the cat"]]) == pytest.approx(0.0, abs=TOLERANCE)
    assert bleu(["a b c d"], [["a b c d e"]]) == pytest.approx(77.88, abs=TOLERANCE)
    # METEOR (exact-match variant)
    assert meteor_lite("a b c", ["a b c"]) == pytest.approx(100.0 * (1 - 0.5 / 27), abs=TOLERANCE)
    assert meteor_lite("x y", ["a b"]) == pytest.approx(0.0, abs=TOLERANCE)
    assert meteor_lite("a c b", ["a b c"]) == pytest.approx(50.0, abs=TOLERANCE)
    # CharacTER
    assert character_ter("abc", "abc") == pytest.approx(0.0, abs=TOLERANCE)
    assert character_ter("acb", "abc") == pytest.approx(33.33, abs=TOLERANCE)
    assert character_ter("", "abc") == pytest.approx(100.0, abs=TOLERANCE)
    # KSMR
    empty = InteractionTrace()
    empty.accept_with("x" * 20)
    assert ksmr(empty) == pytest.approx(5.0, abs=TOLERANCE)
    spread = InteractionTrace()
    for position in (0, 5, 11):
        spread.add_event(position, "c")
    spread.accept_with("x" * 30)
    assert ksmr(spread) == pytest.approx(23.33, abs=TOLERANCE)
    paired = InteractionTrace()
    paired.add_event(3, "a")
    paired.add_event(4, "b")
    paired.accept_with("x" * 10)
    assert ksmr(paired) == pytest.approx(40.0, abs=TOLERANCE)
    # edit distance equals exhaustive edit-script search, all pairs, exact
    alphabet = "abc"
    strings = [""]
    for length in range(1, 5):
        strings += ["".join(p) for p in itertools.product(alphabet, repeat=length)]
    for a in strings:
        oracle = edit_script_distances(a, strings, alphabet)
        for b in strings:
            assert damerau_levenshtein(a, b) == oracle[b], (a, b)
    print(f"\nPASS metric oracles: hand values within {TOLERANCE}; "
          f"edit distance exact on {len(strings) ** 2} pairs")


def test_criterion_latency():
    vocab, scorer, sources = latency_rig(n_words=10_000)
    assert len(vocab) >= 10_000
    cfg = SearchConfig(beam_size=6, max_length=64)
    rng = np.random.default_rng(31337)
    latencies = []
    for source in sources:
        rendered = beam_search(scorer, source, cfg).render()
        position = int(rng.integers(0, len(rendered) + 1))
        constraint = split_prefix(rendered, FeedbackSignal(position, "t"), vocab)
        started = time.perf_counter()
        constrained_search(scorer, source, constraint, cfg)
        latencies.append((time.perf_counter() - started) * 1000.0)
    p50, p90, p99 = (float(np.percentile(latencies, q)) for q in (50, 90, 99))
    print(f"\nPASS latency: n={len(latencies)} p50={p50:.1f}ms p90={p90:.1f}ms p99={p99:.1f}ms")
    assert p99 < 200.0, f"p99 latency {p99:.1f}ms"
