#!/usr/bin/env python3
"""Measure constrained-search latency at a 10k vocabulary, beam 6.

Usage: python scripts/run_latency.py [n_calls]
"""

import sys
import time

import numpy as np

from ipredict.decoder import SearchConfig, beam_search, constrained_search
from ipredict.seqcore import FeedbackSignal, split_prefix
from ipredict.synthetic import latency_rig


def run(n_calls: int = 60) -> None:
    vocab, scorer, sources = latency_rig(n_words=10_000)
    cfg = SearchConfig(beam_size=6, max_length=64)
    rng = np.random.default_rng(31337)
    latencies = []
    for i in range(n_calls):
        source = sources[i % len(sources)]
        rendered = beam_search(scorer, source, cfg).render()
        position = int(rng.integers(0, len(rendered) + 1))
        constraint = split_prefix(rendered, FeedbackSignal(position, "t"), vocab)
        started = time.perf_counter()
        constrained_search(scorer, source, constraint, cfg)
        latencies.append((time.perf_counter() - started) * 1000.0)
    print(f"vocabulary: {len(vocab)} tokens, beam {cfg.beam_size}, "
          f"max length {cfg.max_length}, {len(latencies)} calls")
    for name, q in (("p50", 50), ("p90", 90), ("p99", 99)):
        print(f"  {name}: {np.percentile(latencies, q):7.1f} ms")
    print(f"  mean: {np.mean(latencies):6.1f} ms   max: {max(latencies):6.1f} ms")


if __name__ == "__main__":
    run(int(sys.argv[1]) if len(sys.argv) > 1 else 60)
