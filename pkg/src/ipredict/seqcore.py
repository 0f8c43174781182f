"""Core domain types: vocabulary, token sequences, prefix constraints.

Conventions used throughout the package:

* Detokenization joins token surfaces with a single space. Punctuation is
  part of the token that carries it ("ramp." is one surface).
* The end-of-sequence token renders as the empty string and terminates
  rendering.
* Character positions are Unicode code point indices, never bytes.
* Out-of-vocabulary words map to the unknown id but keep their original
  surface so rendering round-trips exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CorpusFormatError

SEPARATOR = " "

#: Character used by the simulated user to cut a hypothesis that extends
#: past the full reference (a "stop here" keystroke).
END_OF_TEXT = "\x04"


@dataclass(frozen=True)
class Vocabulary:
    """Dense token inventory with begin/end/unknown specials.

    Token ids are the positions in ``tokens``. The end-of-sequence id is
    mandatory; begin-of-sequence and unknown are optional.
    """

    tokens: tuple[str, ...]
    eos_id: int
    bos_id: int | None = None
    unk_id: int | None = None
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, int] = {}
        for i, surface in enumerate(self.tokens):
            if not surface:
                raise ValueError(f"empty surface at id {i}")
            if surface in index:
                raise ValueError(f"duplicate surface {surface!r} at ids {index[surface]} and {i}")
            index[surface] = i
        for name, sid in (("eos", self.eos_id), ("bos", self.bos_id), ("unk", self.unk_id)):
            if sid is not None and not 0 <= sid < len(self.tokens):
                raise ValueError(f"{name} id {sid} out of range for {len(self.tokens)} tokens")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, surface: str) -> bool:
        return surface in self._index

    def surface(self, token_id: int) -> str:
        if not 0 <= token_id < len(self.tokens):
            raise ValueError(f"token id {token_id} out of range for {len(self.tokens)} tokens")
        return self.tokens[token_id]

    def id_of(self, surface: str) -> int | None:
        return self._index.get(surface)

    @classmethod
    def from_tokens(
        cls,
        tokens: list[str] | tuple[str, ...],
        bos: str = "<s>",
        eos: str = "</s>",
        unk: str = "<unk>",
    ) -> "Vocabulary":
        """Build a vocabulary from plain word surfaces, adding missing specials."""
        all_tokens = list(tokens)
        for special in (bos, eos, unk):
            if special not in all_tokens:
                all_tokens.append(special)
        seq = tuple(all_tokens)
        return cls(
            tokens=seq,
            eos_id=seq.index(eos),
            bos_id=seq.index(bos),
            unk_id=seq.index(unk),
        )


def load_vocabulary(path: str) -> Vocabulary:
    """Read a vocabulary file: `#bos/#eos/#unk <surface>` header lines, then
    one surface per line whose line number (among token lines) is its id."""
    specials: dict[str, str] = {}
    tokens: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if line.startswith(("#bos ", "#eos ", "#unk ")):
                key, _, value = line.partition(" ")
                specials[key[1:]] = value
                continue
            if not line:
                raise CorpusFormatError(f"{path}:{lineno}: empty surface line")
            tokens.append(line)
    if "eos" not in specials:
        raise CorpusFormatError(f"{path}: missing #eos header line")
    index = {t: i for i, t in enumerate(tokens)}
    ids: dict[str, int | None] = {}
    for name in ("eos", "bos", "unk"):
        surface = specials.get(name)
        if surface is None:
            ids[name] = None
            continue
        if surface not in index:
            raise CorpusFormatError(f"{path}: special {name} surface {surface!r} not among tokens")
        ids[name] = index[surface]
    return Vocabulary(tokens=tuple(tokens), eos_id=ids["eos"], bos_id=ids["bos"], unk_id=ids["unk"])


def save_vocabulary(vocab: Vocabulary, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"#eos {vocab.tokens[vocab.eos_id]}\n")
        if vocab.bos_id is not None:
            handle.write(f"#bos {vocab.tokens[vocab.bos_id]}\n")
        if vocab.unk_id is not None:
            handle.write(f"#unk {vocab.tokens[vocab.unk_id]}\n")
        for surface in vocab.tokens:
            handle.write(surface + "\n")


@dataclass(frozen=True)
class TokenSequence:
    """A sequence of token ids over a vocabulary.

    ``literals`` overrides the rendered surface per position; it is how
    out-of-vocabulary words survive the round trip through the unknown id.
    """

    vocab: Vocabulary
    ids: tuple[int, ...]
    literals: tuple[str | None, ...] = ()

    def __post_init__(self) -> None:
        if not self.literals:
            object.__setattr__(self, "literals", (None,) * len(self.ids))
        if len(self.literals) != len(self.ids):
            raise ValueError("literals length must match ids length")
        for token_id in self.ids:
            if not 0 <= token_id < len(self.vocab):
                raise ValueError(f"token id {token_id} out of range for {len(self.vocab)} tokens")

    def __len__(self) -> int:
        return len(self.ids)

    def append(self, token_id: int, literal: str | None = None) -> "TokenSequence":
        return TokenSequence(self.vocab, self.ids + (token_id,), self.literals + (literal,))


def tokenize(text: str, vocab: Vocabulary) -> TokenSequence:
    """Map space-separated words to ids, unknown words to the unknown id.

    Unknown words keep their surface in ``literals`` so detokenize(tokenize(s))
    reproduces ``s`` for any whitespace-normalized input.
    """
    ids: list[int] = []
    literals: list[str | None] = []
    for word in text.split():
        token_id = vocab.id_of(word)
        if token_id is None:
            if vocab.unk_id is None:
                raise ValueError(f"word {word!r} not in vocabulary and no unknown id declared")
            ids.append(vocab.unk_id)
            literals.append(word)
        else:
            ids.append(token_id)
            literals.append(None)
    return TokenSequence(vocab, tuple(ids), tuple(literals))


def detokenize(seq: TokenSequence) -> str:
    """Render a token sequence: surfaces joined by single spaces, stopping at
    end-of-sequence (which renders as nothing)."""
    parts: list[str] = []
    for token_id, literal in zip(seq.ids, seq.literals):
        if token_id == seq.vocab.eos_id:
            break
        parts.append(literal if literal is not None else seq.vocab.surface(token_id))
    return SEPARATOR.join(parts)


@dataclass(frozen=True)
class SourceContext:
    """The input object: either tokenized text or a precomputed feature matrix."""

    modality: str
    text: TokenSequence | None = None
    features: tuple[tuple[float, ...], ...] | None = None
    sample_id: str | None = None

    MODALITIES = ("text", "image-features", "video-features")

    def __post_init__(self) -> None:
        if self.modality not in self.MODALITIES:
            raise ValueError(f"unknown modality {self.modality!r}")
        if self.modality == "text":
            if self.text is None or self.features is not None:
                raise ValueError("text modality requires text and forbids features")
        else:
            if self.features is None or self.text is not None:
                raise ValueError(f"{self.modality} modality requires a feature matrix")
            if len(self.features) < 1:
                raise ValueError("feature matrix needs at least one row")
            width = len(self.features[0])
            if any(len(row) != width for row in self.features):
                raise ValueError("feature matrix rows must share one column count")

    @classmethod
    def from_text(cls, text: str | TokenSequence, vocab: Vocabulary | None = None,
                  sample_id: str | None = None) -> "SourceContext":
        if isinstance(text, str):
            if vocab is None:
                raise ValueError("tokenizing a raw string requires a vocabulary")
            text = tokenize(text, vocab)
        return cls(modality="text", text=text, sample_id=sample_id)

    @classmethod
    def from_features(cls, rows: list[list[float]], modality: str = "image-features",
                      sample_id: str | None = None) -> "SourceContext":
        matrix = tuple(tuple(float(v) for v in row) for row in rows)
        return cls(modality=modality, features=matrix, sample_id=sample_id)

    def key(self) -> str | None:
        """Identifier used by table-backed scorers to look the source up."""
        if self.sample_id is not None:
            return self.sample_id
        if self.text is not None:
            return detokenize(self.text)
        return None


@dataclass(frozen=True)
class FeedbackSignal:
    """One character correction: position into the current hypothesis string
    (== length means appending) plus the corrected character."""

    position: int
    character: str

    def __post_init__(self) -> None:
        if self.position < 0:
            raise ValueError("feedback position must be non-negative")
        if len(self.character) != 1:
            raise ValueError("feedback carries exactly one character")


@dataclass(frozen=True)
class PrefixConstraint:
    """A validated prefix: complete tokens plus a trailing word fragment.

    ``trailing_separator`` marks a validated separator after the last complete
    token when the fragment is empty (the user typed a space, closing the
    word). ``char_length`` is the length of :meth:`render`.
    """

    complete_tokens: TokenSequence
    fragment: str = ""
    trailing_separator: bool = False
    char_length: int = field(init=False)

    def __post_init__(self) -> None:
        if SEPARATOR in self.fragment:
            raise ValueError("fragment must not contain the separator")
        if self.fragment and self.trailing_separator:
            raise ValueError("trailing separator is only meaningful with an empty fragment")
        object.__setattr__(self, "char_length", len(self.render()))

    def render(self) -> str:
        base = detokenize(self.complete_tokens)
        if self.fragment:
            return base + SEPARATOR + self.fragment if base else self.fragment
        if self.trailing_separator and base:
            return base + SEPARATOR
        return base

    @property
    def empty(self) -> bool:
        return not self.complete_tokens.ids and not self.fragment

    @classmethod
    def make_empty(cls, vocab: Vocabulary) -> "PrefixConstraint":
        return cls(TokenSequence(vocab, ()))

    @classmethod
    def from_text(cls, text: str, vocab: Vocabulary) -> "PrefixConstraint":
        """Split a validated string into complete tokens plus the trailing
        fragment. Consecutive separators collapse (an empty word closes into
        nothing), so rendering is canonical single-spaced."""
        segments = text.split(SEPARATOR)
        fragment = segments[-1]
        words = [w for w in segments[:-1] if w]
        trailing = fragment == "" and bool(words) and len(segments) > 1
        return cls(tokenize(SEPARATOR.join(words), vocab), fragment, trailing)


def split_prefix(hypothesis: str, feedback: FeedbackSignal, vocab: Vocabulary) -> PrefixConstraint:
    """Turn a correction into the constraint it validates: hypothesis
    characters left of the correction, plus the corrected character itself."""
    if feedback.position > len(hypothesis):
        raise ValueError(
            f"feedback position {feedback.position} beyond hypothesis length {len(hypothesis)}"
        )
    validated = hypothesis[: feedback.position] + feedback.character
    return PrefixConstraint.from_text(validated, vocab)
