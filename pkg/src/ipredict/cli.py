"""Command line entry points.

``ipredict simulate`` runs the simulated-user experiment over a corpus
directory and writes a JSON report; ``ipredict serve`` starts the session
service; ``metrics score`` scores plain-text hypothesis/reference files.

A corpus directory holds:

    vocab.txt              vocabulary (header lines #eos/#bos/#unk, one token per line)
    train.src / train.trg  parallel training text for the ngram scorer
    test.src  / test.trg*  evaluation samples (text modality); extra reference
                           files are test.trg1, test.trg2, ...
    nbest.tsv              candidate table for the nbest scorer
    manifest.jsonl         feature-modality samples (used instead of test.src)
    config.json            optional experiment configuration
"""

from __future__ import annotations

import argparse
import dataclasses
import glob
import json
import os
import sys

from .corpus import Dataset, ExperimentConfig, ScorerConfig, load_features, load_parallel
from .metrics import bleu, character_ter, meteor_lite
from .scorers import NBestScorer, Scorer, train_ngram
from .seqcore import Vocabulary, load_vocabulary, tokenize
from .simulator import SimulationConfig, run_experiment


def _reference_files(directory: str, stem: str = "test") -> list[str]:
    single = os.path.join(directory, f"{stem}.trg")
    numbered = sorted(glob.glob(os.path.join(directory, f"{stem}.trg[0-9]*")))
    if os.path.exists(single):
        return [single] + numbered
    if numbered:
        return numbered
    raise FileNotFoundError(f"no {stem}.trg reference files in {directory}")


def load_corpus_dir(directory: str, vocab: Vocabulary) -> Dataset:
    manifest = os.path.join(directory, "manifest.jsonl")
    if os.path.exists(manifest):
        return load_features(manifest, name=os.path.basename(directory.rstrip("/")))
    source = os.path.join(directory, "test.src")
    return load_parallel(source, _reference_files(directory), vocab,
                         name=os.path.basename(directory.rstrip("/")))


def build_scorer(directory: str, vocab: Vocabulary, config: ScorerConfig) -> Scorer:
    if config.kind == "nbest":
        return NBestScorer.from_file(os.path.join(directory, "nbest.tsv"), vocab,
                                     epsilon=config.epsilon)
    train = load_parallel(os.path.join(directory, "train.src"),
                          _reference_files(directory, "train"), vocab, name="train")
    pairs = [(s.source.text, tokenize(s.references[0], vocab)) for s in train.samples]
    return train_ngram(pairs, order=config.order, smoothing=config.smoothing, lam=config.mix)


def _experiment_config(args) -> ExperimentConfig:
    """Config file first, explicit flags on top."""
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    scorer_fields = {"kind": args.scorer, "order": args.order, "smoothing": args.smoothing,
                     "mix": args.mix, "epsilon": args.epsilon}
    scorer = dataclasses.replace(
        config.scorer, **{k: v for k, v in scorer_fields.items() if v is not None})
    search_fields = {"beam_size": args.beam, "max_length": args.max_length,
                     "length_normalization": args.length_normalization}
    search = dataclasses.replace(
        config.search, **{k: v for k, v in search_fields.items() if v is not None})
    ksmr = config.ksmr
    if args.no_acceptance_action:
        ksmr = dataclasses.replace(ksmr, count_acceptance=False)
    return dataclasses.replace(
        config, scorer=scorer, search=search, ksmr=ksmr,
        max_interactions=args.max_interactions or config.max_interactions,
        reference_policy=args.reference_policy or config.reference_policy,
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="corpus directory")
    parser.add_argument("--config", help="experiment config JSON file")
    parser.add_argument("--scorer", choices=["ngram", "nbest"], help="model kind")
    parser.add_argument("--order", type=int, help="n-gram order")
    parser.add_argument("--smoothing", type=float, help="additive smoothing constant")
    parser.add_argument("--mix", type=float, help="lexical component weight, 0..1")
    parser.add_argument("--epsilon", type=float, help="n-best off-list backoff mass")
    parser.add_argument("--beam", type=int, help="beam size")
    parser.add_argument("--max-length", type=int, help="generated-token cap")
    parser.add_argument("--length-normalization", choices=["none", "divide-by-length"])
    parser.add_argument("--max-interactions", type=int,
                        help="session cap (default: 2x reference characters)")
    parser.add_argument("--reference-policy", choices=["first", "min-initial-character-ter"])
    parser.add_argument("--no-acceptance-action", action="store_true",
                        help="do not count the final acceptance as a mouse action")


def cmd_simulate(args) -> int:
    config = _experiment_config(args)
    vocab = load_vocabulary(os.path.join(args.corpus, "vocab.txt"))
    dataset = load_corpus_dir(args.corpus, vocab)
    scorer = build_scorer(args.corpus, vocab, config.scorer)
    sim = SimulationConfig(search=config.search, max_interactions=config.max_interactions,
                           reference_policy=config.reference_policy, ksmr=config.ksmr)
    report = run_experiment(dataset, scorer, sim)
    payload = {"config": config.to_dict(), **report.to_dict()}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    print(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import InteractiveEngine, create_app

    config = _experiment_config(args)
    vocab = load_vocabulary(os.path.join(args.corpus, "vocab.txt"))
    dataset = load_corpus_dir(args.corpus, vocab)
    scorer = build_scorer(args.corpus, vocab, config.scorer)
    engine = InteractiveEngine(
        scorer,
        search=config.search,
        samples={s.id: s.source for s in dataset.samples},
        ksmr_convention=config.ksmr,
        ttl_seconds=args.ttl,
    )
    ui_dir = args.ui_dir or _default_ui_dir()
    app = create_app(engine, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _default_ui_dir() -> str | None:
    here = os.path.dirname(os.path.abspath(__file__))
    for candidate in (
        os.path.join(os.getcwd(), "frontend", "dist"),
        os.path.abspath(os.path.join(here, "..", "..", "frontend", "dist")),
    ):
        if os.path.isdir(candidate):
            return candidate
    return None


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ipredict",
                                     description="interactive-predictive sequence prediction")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run the simulated-user experiment")
    _add_common(simulate)
    simulate.add_argument("--report", help="write the JSON report here")
    simulate.set_defaults(func=cmd_simulate)

    serve = sub.add_parser("serve", help="start the HTTP session service")
    _add_common(serve)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--ttl", type=float, default=1800.0, help="idle session TTL seconds")
    serve.add_argument("--ui-dir", help="static UI bundle directory")
    serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


def _read_plain(path: str) -> list[str]:
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def cmd_score(args) -> int:
    hypotheses = _read_plain(args.hyp)
    reference_sets = None
    for path in args.ref.split(","):
        lines = _read_plain(path)
        if len(lines) != len(hypotheses):
            raise SystemExit(f"line count mismatch: {len(hypotheses)} vs {len(lines)} ({path})")
        if reference_sets is None:
            reference_sets = [[line] for line in lines]
        else:
            for refs, line in zip(reference_sets, lines):
                refs.append(line)
    report: dict[str, object] = {"samples": len(hypotheses)}
    wanted = args.metric
    if wanted in ("bleu", "all"):
        report["bleu"] = bleu(hypotheses, reference_sets)
    if wanted in ("meteor", "all"):
        report["meteor_lite"] = sum(meteor_lite(h, r) for h, r in
                                    zip(hypotheses, reference_sets)) / len(hypotheses)
    if wanted in ("character", "all"):
        report["character_ter"] = sum(min(character_ter(h, ref) for ref in refs)
                                      for h, refs in zip(hypotheses, reference_sets)) / len(hypotheses)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def metrics_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="metrics", description="score hypothesis files")
    sub = parser.add_subparsers(dest="command", required=True)
    score = sub.add_parser("score", help="score hypotheses against references")
    score.add_argument("--hyp", required=True, help="hypothesis file, one sentence per line")
    score.add_argument("--ref", required=True,
                       help="reference file, or comma-separated list of files")
    score.add_argument("--metric", choices=["bleu", "meteor", "character", "all"], default="all")
    score.set_defaults(func=cmd_score)
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
