#!/usr/bin/env python3
"""Replay the bundled showcase session iteration by iteration."""

from ipredict.decoder import beam_search, constrained_search
from ipredict.demo import DEMO_REFERENCE, demo_scorer, demo_source, demo_vocabulary
from ipredict.metrics import ksmr
from ipredict.seqcore import FeedbackSignal, split_prefix
from ipredict.simulator import leftmost_mismatch, simulate_session


def main() -> None:
    vocab = demo_vocabulary()
    scorer = demo_scorer(vocab)
    source = demo_source()
    hypothesis = beam_search(scorer, source).render()
    print(f"target : {DEMO_REFERENCE}")
    print(f"iter 0 : {hypothesis}")
    iteration = 0
    while hypothesis != DEMO_REFERENCE:
        iteration += 1
        position, character = leftmost_mismatch(hypothesis, DEMO_REFERENCE)
        constraint = split_prefix(hypothesis, FeedbackSignal(position, character), vocab)
        hypothesis = constrained_search(scorer, source, constraint).render()
        print(f"iter {iteration} : typed {character!r} at {position:2d} -> {hypothesis}")
    trace = simulate_session(scorer, source, DEMO_REFERENCE)
    print(f"accepted after {len(trace.events)} keystrokes, KSMR {ksmr(trace):.2f}")


if __name__ == "__main__":
    main()
