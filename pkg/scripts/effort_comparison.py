#!/usr/bin/env python3
"""Compare static post-editing effort against interactive correction effort.

Runs the full experiment on two synthetic corpora (an informative candidate
model and a trained n-gram model) and prints one table row per run: quality
of the initial predictions, the static CharacTER and the interactive KSMR.
"""

from ipredict.decoder import SearchConfig
from ipredict.simulator import SimulationConfig, run_experiment
from ipredict.synthetic import convergence_corpus, informative_nbest_corpus


def row(name, report):
    static, interactive = report.static, report.interactive
    print(f"{name:22s} {report.samples:5d}  "
          f"{static.bleu:7.1f} {static.meteor_lite:7.1f} {static.character_ter:9.1f} "
          f"{interactive.ksmr:7.1f}  "
          f"{interactive.counts.keystrokes:6d} {interactive.counts.mouse_actions:6d}  "
          f"{report.latency.p99_ms:7.1f}")


def main() -> None:
    print(f"{'corpus':22s} {'#':>5s}  {'BLEU':>7s} {'METEOR*':>7s} {'CharacTER':>9s} "
          f"{'KSMR':>7s}  {'keys':>6s} {'mouse':>6s}  {'p99 ms':>7s}")
    dataset, scorer = informative_nbest_corpus(n_samples=40)
    row(dataset.name, run_experiment(dataset, scorer))
    dataset, scorer = convergence_corpus(n_samples=200)
    # raw scores degenerate to the shortest stop on this corpus; normalize
    cfg = SimulationConfig(search=SearchConfig(length_normalization="divide-by-length"))
    row(dataset.name, run_experiment(dataset, scorer, cfg))
    print("\n(METEOR* is the exact-match variant; KSMR counts keystrokes plus")
    print("mouse actions per hundred characters of the accepted output.)")


if __name__ == "__main__":
    main()
