import itertools
import json

import pytest

from helpers import small_vocab, text_source
from ipredict.corpus import Dataset, Sample
from ipredict.decoder import beam_search
from ipredict.errors import UnknownSourceError
from ipredict.metrics import damerau_levenshtein, ksmr
from ipredict.scorers import NBestScorer, train_ngram
from ipredict.seqcore import END_OF_TEXT, SourceContext, Vocabulary, tokenize
from ipredict.simulator import (
    LatencyStats,
    SimulationConfig,
    leftmost_mismatch,
    run_experiment,
    simulate_session,
)

from ipredict.demo import DEMO_REFERENCE, demo_dataset, demo_scorer, demo_source, demo_vocabulary


def nbest(vocab, table):
    packed = {key: [(tokenize(t, vocab), lp) for t, lp in cands] for key, cands in table.items()}
    return NBestScorer(vocab, packed)


def feature_source(key):
    return SourceContext.from_features([[0.0]], sample_id=key)


class TestLeftmostMismatch:
    def test_equal_is_none(self):
        assert leftmost_mismatch("abc", "abc") is None

    def test_first_difference(self):
        assert leftmost_mismatch("abxd", "abcd") == (2, "c")

    def test_hypothesis_strict_prefix_appends(self):
        assert leftmost_mismatch("ab", "abcd") == (2, "c")

    def test_reference_strict_prefix_stops(self):
        assert leftmost_mismatch("abcd", "ab") == (2, END_OF_TEXT)


class TestSimulateSession:
    def test_zero_corrections_when_initial_is_right(self):
        vocab = small_vocab(3)
        scorer = nbest(vocab, {"k": [("w0 w1", -0.5)]})
        trace = simulate_session(scorer, feature_source("k"), "w0 w1")
        assert trace.accepted and not trace.capped
        assert trace.events == []
        assert trace.final_prediction == "w0 w1"
        assert ksmr(trace) == pytest.approx(100.0 / len("w0 w1"))

    def test_demo_session_regression(self):
        trace = simulate_session(demo_scorer(), demo_source(), DEMO_REFERENCE)
        assert [e.character for e in trace.events] == ["b", "u", "n"]
        assert [e.position for e in trace.events] == [27, 33, 40]
        assert trace.accepted
        assert trace.final_prediction == DEMO_REFERENCE
        assert ksmr(trace) == pytest.approx(100.0 * 7 / 51)

    def test_three_candidate_list_converges_with_one_correction(self):
        # initial decode picks the top distractor; it diverges from the
        # reference at the first character of the second word, so a single
        # masked correction pins the reference candidate
        vocab = Vocabulary.from_tokens(["the", "cat", "dog", "sat", "ran"])
        scorer = nbest(vocab, {"k": [
            ("the dog ran", -0.5),
            ("the cat sat", -1.0),
            ("the cat ran", -2.0),
        ]})
        reference = "the cat sat"
        trace = simulate_session(scorer, feature_source("k"), reference)
        assert trace.accepted
        assert trace.final_prediction == reference
        assert [(e.position, e.character) for e in trace.events] == [(4, "c")]
        assert len(trace.events) <= len(reference)

    def test_end_of_text_event_cuts_overlong_hypothesis(self):
        vocab = small_vocab(4)
        scorer = nbest(vocab, {"k": [("w0 w1 w2", -0.5)]})
        reference = "w0 w1"
        trace = simulate_session(scorer, feature_source("k"), reference)
        assert trace.accepted
        assert trace.final_prediction == reference
        assert trace.events[-1].character == END_OF_TEXT
        assert trace.events[-1].position == len(reference)

    def test_cap_flags_trace_without_accepting(self):
        vocab = small_vocab(4)
        scorer = nbest(vocab, {"k": [("w0 w0 w0", -0.1)]})
        cfg = SimulationConfig(max_interactions=1)
        trace = simulate_session(scorer, feature_source("k"), "w1 w2 w3 w1 w2", cfg)
        assert trace.capped and not trace.accepted
        with pytest.raises(ValueError):
            ksmr(trace)

    def test_empty_reference_rejected(self):
        vocab = small_vocab(2)
        scorer = nbest(vocab, {"k": [("w0", -0.5)]})
        with pytest.raises(ValueError):
            simulate_session(scorer, feature_source("k"), "")

    def test_termination_bound_over_random_ngram_sessions(self):
        vocab = small_vocab(6)
        corpus = [(tokenize("w0", vocab), tokenize(t, vocab))
                  for t in ("w1 w2 w3", "w1 w3 w2", "w2 w2 w5")]
        scorer = train_ngram(corpus, order=2, smoothing=0.05, lam=0.2)
        for words in itertools.permutations(["w1", "w2", "w3"]):
            reference = " ".join(words)
            trace = simulate_session(scorer, text_source("w0", vocab), reference)
            assert trace.accepted
            assert trace.final_prediction == reference
            assert len(trace.events) <= len(reference) + 1


def perfect_dataset(vocab, texts):
    samples = []
    table = {}
    for i, text in enumerate(texts):
        key = f"s{i}"
        samples.append(Sample(id=key, source=feature_source(key), references=(text,)))
        table[key] = [(text, -0.5)]
    return Dataset(name="perfect", modality="image-features", samples=tuple(samples)), table


class TestRunExperiment:
    def test_perfect_decodes(self):
        vocab = small_vocab(6)
        texts = ["w0 w1 w2", "w3 w4", "w5 w0 w1 w2"]
        dataset, table = perfect_dataset(vocab, texts)
        report = run_experiment(dataset, nbest(vocab, table))
        assert report.static.character_ter == pytest.approx(0.0)
        assert report.static.bleu == pytest.approx(100.0)
        assert report.interactive.counts.keystrokes == 0
        expected = 100.0 * len(texts) / sum(len(t) for t in texts)
        assert report.interactive.ksmr == pytest.approx(expected)
        assert report.capped_sessions == 0

    def test_demo_dataset_ksmr(self):
        report = run_experiment(demo_dataset(), demo_scorer())
        assert report.interactive.counts.keystrokes == 3
        assert report.interactive.counts.mouse_actions == 4
        assert report.interactive.ksmr == pytest.approx(100.0 * 7 / 51)
        # static pass: editing the initial caption into the reference takes
        # far more operations than the three interactive keystrokes
        initial = beam_search(demo_scorer(), demo_source()).render()
        assert damerau_levenshtein(initial, DEMO_REFERENCE) <= 27

    def test_better_coverage_never_hurts(self):
        vocab = small_vocab(8)
        texts = ["w0 w1 w2 w3", "w4 w5 w6", "w7 w0 w1"]
        dataset, table = perfect_dataset(vocab, texts)
        good = nbest(vocab, table)
        bad_table = {key: [("w7 w7", -0.5)] for key in table}
        bad = nbest(vocab, bad_table)
        good_report = run_experiment(dataset, good)
        bad_report = run_experiment(dataset, bad)
        assert good_report.interactive.ksmr <= bad_report.interactive.ksmr

    def test_scorer_dataset_mismatch_lists_ids(self):
        vocab = small_vocab(4)
        dataset, table = perfect_dataset(vocab, ["w0 w1"])
        scorer = nbest(vocab, {"other": [("w0", -0.5)]})
        with pytest.raises(UnknownSourceError, match="s0"):
            run_experiment(dataset, scorer)

    def test_empty_dataset_rejected(self):
        vocab = small_vocab(2)
        dataset = Dataset(name="empty", modality="text", samples=())
        with pytest.raises(ValueError):
            run_experiment(dataset, nbest(vocab, {"k": [("w0", -0.5)]}))

    def test_reproducible_report_under_injected_clock(self):
        vocab = small_vocab(6)
        texts = ["w0 w1 w2", "w3 w4 w0"]
        dataset, table = perfect_dataset(vocab, texts)
        table["s0"] = [("w1 w1 w1", -0.2), (texts[0], -0.5)]

        def fake_clock_factory():
            counter = itertools.count()
            return lambda: float(next(counter))

        scorer = nbest(vocab, table)
        first = run_experiment(dataset, scorer, clock=fake_clock_factory())
        second = run_experiment(dataset, scorer, clock=fake_clock_factory())
        assert json.dumps(first.to_dict(), sort_keys=True) == \
            json.dumps(second.to_dict(), sort_keys=True)

    def test_reference_policy_min_initial_character_ter(self):
        vocab = small_vocab(6)
        sample = Sample(id="s0", source=feature_source("s0"),
                        references=("w5 w5 w5 w5", "w0 w1"))
        dataset = Dataset(name="multi", modality="image-features", samples=(sample,))
        scorer = nbest(vocab, {"s0": [("w0 w1", -0.5)]})
        first = run_experiment(dataset, scorer, SimulationConfig(reference_policy="first"))
        best = run_experiment(dataset, scorer,
                              SimulationConfig(reference_policy="min-initial-character-ter"))
        assert first.interactive.counts.keystrokes > 0
        assert best.interactive.counts.keystrokes == 0


class TestLatencyStats:
    def test_percentiles_monotone(self):
        stats = LatencyStats.from_samples([5.0, 1.0, 9.0, 3.0, 2.0])
        assert stats.p50_ms <= stats.p90_ms <= stats.p99_ms
        assert stats.count == 5

    def test_empty(self):
        stats = LatencyStats.from_samples([])
        assert stats.count == 0 and stats.mean_ms == 0.0

    def test_invalid_ordering_rejected(self):
        with pytest.raises(ValueError):
            LatencyStats(count=1, mean_ms=1.0, p50_ms=5.0, p90_ms=1.0, p99_ms=9.0)
