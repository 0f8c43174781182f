"""Dataset ingestion: line-aligned parallel text, feature-matrix manifests,
experiment configuration files."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, asdict

from .decoder import SearchConfig
from .errors import CorpusFormatError
from .metrics import KsmrConvention
from .scorers import read_feature_matrix
from .seqcore import SourceContext, Vocabulary, detokenize, tokenize


@dataclass(frozen=True)
class Sample:
    id: str
    source: SourceContext
    references: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.references:
            raise ValueError(f"sample {self.id!r} has no reference")


@dataclass(frozen=True)
class Dataset:
    name: str
    modality: str
    samples: tuple[Sample, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for sample in self.samples:
            if sample.id in seen:
                raise ValueError(f"duplicate sample id {sample.id!r}")
            seen.add(sample.id)

    def __len__(self) -> int:
        return len(self.samples)

    def by_id(self) -> dict[str, Sample]:
        return {s.id: s for s in self.samples}


def _read_lines(path: str) -> list[str]:
    with open(path, "rb") as handle:
        data = handle.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusFormatError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def load_parallel(source_file: str, reference_files: list[str], vocab: Vocabulary,
                  name: str | None = None) -> Dataset:
    """Line i of the source file plus line i of every reference file form
    sample i. All files must agree on line count and be valid UTF-8."""
    sources = _read_lines(source_file)
    reference_columns = []
    for path in reference_files:
        lines = _read_lines(path)
        if len(lines) != len(sources):
            raise CorpusFormatError(
                f"line count mismatch: {len(sources)} vs {len(lines)} ({source_file} vs {path})"
            )
        reference_columns.append(lines)
    samples = tuple(
        Sample(
            id=str(i),
            source=SourceContext.from_text(tokenize(line, vocab), sample_id=str(i)),
            references=tuple(column[i] for column in reference_columns),
        )
        for i, line in enumerate(sources)
    )
    return Dataset(name=name or os.path.basename(source_file), modality="text", samples=samples)


def write_parallel(dataset: Dataset, source_file: str, reference_files: list[str]) -> None:
    """Inverse of :func:`load_parallel` for convention-normalized corpora."""
    if dataset.modality != "text":
        raise ValueError("only text datasets serialize to parallel files")
    width = len(dataset.samples[0].references) if dataset.samples else 0
    if len(reference_files) != width:
        raise ValueError(f"dataset has {width} references per sample, got {len(reference_files)} files")
    with open(source_file, "w", encoding="utf-8") as handle:
        for sample in dataset.samples:
            handle.write(detokenize(sample.source.text) + "\n")
    for column, path in enumerate(reference_files):
        with open(path, "w", encoding="utf-8") as handle:
            for sample in dataset.samples:
                handle.write(sample.references[column] + "\n")


def load_features(manifest_file: str, modality: str = "image-features",
                  name: str | None = None) -> Dataset:
    """Manifest is JSON lines: {"id": ..., "features": "path", "refs": [...]}.
    Feature paths resolve relative to the manifest. Column counts must be
    uniform across the dataset."""
    base = os.path.dirname(os.path.abspath(manifest_file))
    samples: list[Sample] = []
    width: int | None = None
    with open(manifest_file, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{manifest_file}:{lineno}: bad JSON: {exc}") from exc
            for key in ("id", "features", "refs"):
                if key not in record:
                    raise CorpusFormatError(f"{manifest_file}:{lineno}: missing field {key!r}")
            path = os.path.join(base, record["features"])
            if not os.path.exists(path):
                raise CorpusFormatError(f"{manifest_file}:{lineno}: feature file not found: {path}")
            rows = read_feature_matrix(path)
            if width is None:
                width = len(rows[0])
            elif len(rows[0]) != width:
                raise CorpusFormatError(
                    f"sample {record['id']!r}: {len(rows[0])} columns, dataset uses {width}"
                )
            samples.append(Sample(
                id=str(record["id"]),
                source=SourceContext.from_features(rows, modality=modality,
                                                   sample_id=str(record["id"])),
                references=tuple(record["refs"]),
            ))
    return Dataset(name=name or os.path.basename(manifest_file), modality=modality,
                   samples=tuple(samples))


@dataclass(frozen=True)
class CorpusReport:
    source_oov_rate: float
    reference_oov_rate: float
    source_length_histogram: dict[int, int]
    reference_length_histogram: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "source_oov_rate": self.source_oov_rate,
            "reference_oov_rate": self.reference_oov_rate,
            "source_length_histogram": {str(k): v for k, v in sorted(self.source_length_histogram.items())},
            "reference_length_histogram": {str(k): v for k, v in sorted(self.reference_length_histogram.items())},
        }


def validate(dataset: Dataset, vocab: Vocabulary) -> CorpusReport:
    """Out-of-vocabulary percentages and per-sample token-length histograms
    (reference side uses the first reference). Never mutates the dataset."""
    if dataset.modality != "text":
        raise ValueError("validation applies to text datasets")
    src_tokens = src_oov = ref_tokens = ref_oov = 0
    src_hist: dict[int, int] = {}
    ref_hist: dict[int, int] = {}
    for sample in dataset.samples:
        seq = sample.source.text
        src_tokens += len(seq)
        src_oov += sum(1 for lit in seq.literals if lit is not None)
        src_hist[len(seq)] = src_hist.get(len(seq), 0) + 1
        words = sample.references[0].split()
        ref_tokens += len(words)
        ref_oov += sum(1 for w in words if w not in vocab)
        ref_hist[len(words)] = ref_hist.get(len(words), 0) + 1
    return CorpusReport(
        source_oov_rate=100.0 * src_oov / src_tokens if src_tokens else 0.0,
        reference_oov_rate=100.0 * ref_oov / ref_tokens if ref_tokens else 0.0,
        source_length_histogram=src_hist,
        reference_length_histogram=ref_hist,
    )


# ---------------------------------------------------------------------------
# Experiment configuration


@dataclass(frozen=True)
class ScorerConfig:
    kind: str = "ngram"  # ngram | nbest
    order: int = 3
    smoothing: float = 0.1
    mix: float = 0.3  # weight of the lexical component
    epsilon: float = 1e-9  # n-best off-list backoff

    def __post_init__(self) -> None:
        if self.kind not in ("ngram", "nbest"):
            raise ValueError(f"unknown scorer kind {self.kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    scorer: ScorerConfig = ScorerConfig()
    search: SearchConfig = SearchConfig()
    max_interactions: int | None = None  # None: 2 * reference character count
    reference_policy: str = "first"  # first | min-initial-character-ter
    ksmr: KsmrConvention = KsmrConvention()

    def __post_init__(self) -> None:
        if self.max_interactions is not None and self.max_interactions < 1:
            raise ValueError("interaction cap must be >= 1")
        if self.reference_policy not in ("first", "min-initial-character-ter"):
            raise ValueError(f"unknown reference policy {self.reference_policy!r}")

    def to_dict(self) -> dict:
        return {
            "scorer": asdict(self.scorer),
            "search": asdict(self.search),
            "simulation": {
                "max_interactions": self.max_interactions,
                "reference_policy": self.reference_policy,
            },
            "ksmr": asdict(self.ksmr),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        simulation = data.get("simulation", {})
        return cls(
            scorer=ScorerConfig(**data.get("scorer", {})),
            search=SearchConfig(**data.get("search", {})),
            max_interactions=simulation.get("max_interactions"),
            reference_policy=simulation.get("reference_policy", "first"),
            ksmr=KsmrConvention(**data.get("ksmr", {})),
        )

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))
